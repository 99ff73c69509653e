#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace fosterflow {

/// Two-component 1-D Gaussian mixture. Component 0 always has the lower mean.
struct GmmFit {
  std::array<double, 2> mixture_weights{0.5, 0.5};
  std::array<double, 2> means{0.0, 0.0};
  std::array<double, 2> variances{1.0, 1.0};
  std::vector<std::array<double, 2>> responsibilities;
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;
};

struct GmmOptions {
  double tol = 1e-8;
  std::size_t max_iter = 500;
  std::uint64_t seed = 0;
  /// Extra EM runs from random initial means; the best final likelihood wins.
  std::size_t restarts = 0;
};

enum class Component { low, high };

namespace detail {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0; // population (1/n)
};

inline SampleMoments moments(std::span<const double> x) {
  SampleMoments m;
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(x.size());
  return m;
}

inline double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

/// Posterior pair and log of the mixture density at x.
inline std::array<double, 2> posterior(const GmmFit &fit, double x, double *log_density) {
  const double a = std::log(fit.mixture_weights[0]) +
                   log_normal_pdf(x, fit.means[0], fit.variances[0]);
  const double b = std::log(fit.mixture_weights[1]) +
                   log_normal_pdf(x, fit.means[1], fit.variances[1]);
  const double m = std::max(a, b);
  if (m == -std::numeric_limits<double>::infinity()) {
    if (log_density) *log_density = m;
    return {0.5, 0.5};
  }
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double total = ea + eb;
  if (log_density) *log_density = m + std::log(total);
  const double r0 = ea / total;
  return {r0, 1.0 - r0};
}

/// EM from the parameters already stored in `fit`.
inline void run_em(GmmFit &fit, std::span<const double> x, double variance_floor,
                   const GmmOptions &opt) {
  const std::size_t n = x.size();
  fit.responsibilities.assign(n, {0.5, 0.5});
  fit.log_likelihood_trace.clear();
  fit.converged = false;
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double ld = 0.0;
      fit.responsibilities[i] = posterior(fit, x[i], &ld);
      ll += ld;
    }
    fit.log_likelihood_trace.push_back(ll);
    fit.iterations = it + 1;
    if (it > 0) {
      const double prev = fit.log_likelihood_trace[it - 1];
      const double scale = prev != 0.0 ? std::abs(prev) : 1.0;
      if (std::abs(ll - prev) < opt.tol * scale) {
        fit.converged = true;
        break;
      }
    }
    if (it + 1 == opt.max_iter) break;

    for (std::size_t k = 0; k < 2; ++k) {
      double nk = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += fit.responsibilities[i][k];
        sx += fit.responsibilities[i][k] * x[i];
      }
      if (!(nk > 0.0)) {
        // Empty component: keep its mean, shrink to the floor.
        fit.mixture_weights[k] = 0.0;
        fit.variances[k] = variance_floor;
        continue;
      }
      const double mean = sx / nk;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        sv += fit.responsibilities[i][k] * d * d;
      }
      fit.means[k] = mean;
      fit.variances[k] = std::max(sv / nk, variance_floor);
      fit.mixture_weights[k] = nk / static_cast<double>(n);
    }
    const double total = fit.mixture_weights[0] + fit.mixture_weights[1];
    fit.mixture_weights[0] /= total;
    fit.mixture_weights[1] = 1.0 - fit.mixture_weights[0];
  }
}

inline void order_by_mean(GmmFit &fit) {
  if (fit.means[0] <= fit.means[1]) return;
  std::swap(fit.means[0], fit.means[1]);
  std::swap(fit.variances[0], fit.variances[1]);
  std::swap(fit.mixture_weights[0], fit.mixture_weights[1]);
  for (auto &r : fit.responsibilities) std::swap(r[0], r[1]);
}

} // namespace detail

/// Fits a two-component mixture by EM.
///
/// Initialization splits the sorted data at the median: each half supplies
/// one component's mean and variance, with equal mixture weights. Variances
/// are floored at 1e-10 * (sample variance + 1e-12) in every M-step. EM stops
/// when the relative log-likelihood change drops below `tol` or after
/// `max_iter` E-steps.
///
/// The fit is flagged degenerate when the data has no spread (standard
/// deviation below 1e-9 * max(1, |mean|)) or when the converged means are
/// closer than 1e-6 standard deviations.
inline GmmFit fit_gmm_1d(std::span<const double> values, const GmmOptions &opt = {}) {
  if (values.size() < 4)
    throw std::invalid_argument("GMM fit needs at least 4 values, got " +
                                std::to_string(values.size()));
  if (opt.max_iter < 1) throw std::invalid_argument("GMM max_iter must be >= 1");
  const auto sample = detail::moments(values);
  const double sd = std::sqrt(sample.variance);
  const double variance_floor = 1e-10 * (sample.variance + 1e-12);

  GmmFit fit;
  if (sd < 1e-9 * std::max(1.0, std::abs(sample.mean))) {
    fit.means = {sample.mean, sample.mean};
    fit.variances = {variance_floor, variance_floor};
    fit.responsibilities.assign(values.size(), {0.5, 0.5});
    fit.converged = true;
    fit.degenerate = true;
    return fit;
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = sorted.size() / 2;
  const auto lower = detail::moments(std::span<const double>(sorted).first(half));
  const auto upper = detail::moments(std::span<const double>(sorted).subspan(half));
  fit.means = {lower.mean, upper.mean};
  fit.variances = {std::max(lower.variance, variance_floor),
                   std::max(upper.variance, variance_floor)};
  detail::run_em(fit, values, variance_floor, opt);

  if (opt.restarts > 0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    for (std::size_t r = 0; r < opt.restarts; ++r) {
      GmmFit trial;
      trial.means = {values[pick(rng)], values[pick(rng)]};
      trial.variances = {std::max(sample.variance, variance_floor),
                         std::max(sample.variance, variance_floor)};
      detail::run_em(trial, values, variance_floor, opt);
      if (trial.log_likelihood_trace.back() > fit.log_likelihood_trace.back())
        fit = std::move(trial);
    }
  }

  detail::order_by_mean(fit);
  if (std::abs(fit.means[1] - fit.means[0]) < 1e-6 * sd) fit.degenerate = true;
  return fit;
}

/// Labels each value with its most probable component; exact ties go to low.
/// Throws std::logic_error on a degenerate fit.
inline std::vector<Component> assign_components(const GmmFit &fit,
                                                std::span<const double> values) {
  if (fit.degenerate)
    throw std::logic_error("cannot assign components from a degenerate GMM fit");
  std::vector<Component> out;
  out.reserve(values.size());
  for (double x : values) {
    const auto r = detail::posterior(fit, x, nullptr);
    out.push_back(r[1] > r[0] ? Component::high : Component::low);
  }
  return out;
}

struct SeparationTest {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double dof = 1.0;
};

/// Two-sided Student t tail probability P(|T| >= |t|) with `dof` degrees of
/// freedom, via the regularized incomplete beta function.
inline double student_t_two_sided_p(double t, double dof) {
  if (t == 0.0) return 1.0;
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(boost::math::ibeta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
inline SeparationTest welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("Welch t-test needs at least 2 values per sample");
  auto unbiased = [](std::span<const double> x) {
    auto m = detail::moments(x);
    const double n = static_cast<double>(x.size());
    return std::pair{m.mean, m.variance * n / (n - 1.0)};
  };
  const auto [ma, va] = unbiased(a);
  const auto [mb, vb] = unbiased(b);
  if (!(va > 0.0) || !(vb > 0.0))
    throw std::invalid_argument("Welch t-test needs samples with positive variance");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  SeparationTest out;
  out.t_statistic = (ma - mb) / std::sqrt(sa + sb);
  out.dof = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  out.p_value = student_t_two_sided_p(out.t_statistic, out.dof);
  return out;
}

} // namespace fosterflow
