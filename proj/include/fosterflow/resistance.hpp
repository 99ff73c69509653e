#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "graph.hpp"

namespace fosterflow {

/// Combinatorial Laplacian L = D - W, dense.
struct LaplacianMatrix {
  Eigen::MatrixXd entries;
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

/// Moore-Penrose pseudoinverse of a Laplacian, dense.
struct PseudoinverseMatrix {
  Eigen::MatrixXd entries;
  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
};

/// Per-edge effective resistances in canonical edge order, plus the
/// Foster sum  sum_e w_e R_e, which equals n - 1 on connected graphs.
struct ResistanceReport {
  std::vector<EdgeKey> edges;
  std::vector<double> per_edge;
  double foster_sum = 0.0;

  double at(EdgeKey key) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key)
      throw std::invalid_argument("edge not present in resistance report");
    return per_edge[static_cast<std::size_t>(it - edges.begin())];
  }
};

/// Weights are used directly as conductances.
inline LaplacianMatrix build_laplacian(const WeightedGraph &g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  LaplacianMatrix L{Eigen::MatrixXd::Zero(n, n)};
  for (const auto &e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.key.u);
    const auto v = static_cast<Eigen::Index>(e.key.v);
    L.entries(u, v) -= e.weight;
    L.entries(v, u) -= e.weight;
    L.entries(u, u) += e.weight;
    L.entries(v, v) += e.weight;
  }
  return L;
}

namespace detail {

inline std::size_t laplacian_component_count(const Eigen::MatrixXd &L) {
  const auto n = static_cast<std::size_t>(L.rows());
  if (n == 0) return 0;
  DisjointSets sets(n);
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    for (Eigen::Index j = i + 1; j < L.cols(); ++j)
      if (L(i, j) != 0.0)
        sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (sets.find(i) == i) ++count;
  return count;
}

/// Spectral pseudoinverse; eigenvalues at or below cutoff * lambda_max are
/// treated as zero.
inline Eigen::MatrixXd spectral_pseudoinverse(const Eigen::MatrixXd &L,
                                              double relative_cutoff = 1e-10) {
  const auto n = L.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
  if (eig.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition did not converge (n=" +
                         std::to_string(n) + ")");
  const Eigen::VectorXd &lambda = eig.eigenvalues();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  if (lambda_max == 0.0) return Eigen::MatrixXd::Zero(n, n);
  const double cutoff = relative_cutoff * lambda_max;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(lambda(i)) > cutoff) inv(i) = 1.0 / lambda(i);
  const Eigen::MatrixXd &V = eig.eigenvectors();
  Eigen::MatrixXd P = V * inv.asDiagonal() * V.transpose();
  return 0.5 * (P + P.transpose());
}

} // namespace detail

/// For a connected Laplacian, L+ = (L + J/n)^-1 - J/n with J the all-ones
/// matrix; the shifted matrix is SPD and is factored with Cholesky.
/// Disconnected or numerically rank-deficient inputs fall back to a full
/// eigendecomposition.
inline PseudoinverseMatrix pseudoinverse(const LaplacianMatrix &L) {
  const auto n = L.entries.rows();
  if (n == 0) return {Eigen::MatrixXd(0, 0)};
  if (detail::laplacian_component_count(L.entries) == 1) {
    const double shift = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd shifted = L.entries.array() + shift;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd X = llt.solve(Eigen::MatrixXd::Identity(n, n));
      X.array() -= shift;
      return {0.5 * (X + X.transpose())};
    }
  }
  return {detail::spectral_pseudoinverse(L.entries)};
}

inline double resistance_distance(const PseudoinverseMatrix &P, NodeId i, NodeId j) {
  const auto a = static_cast<Eigen::Index>(i);
  const auto b = static_cast<Eigen::Index>(j);
  return P.entries(a, a) + P.entries(b, b) - 2.0 * P.entries(a, b);
}

/// R_uv = L+_uu + L+_vv - 2 L+_uv for each edge.
/// Throws DisconnectedGraphError unless g is connected.
inline ResistanceReport effective_resistances(const WeightedGraph &g) {
  const std::size_t components = component_count(g);
  if (components != 1) throw DisconnectedGraphError(components);
  const PseudoinverseMatrix P = pseudoinverse(build_laplacian(g));
  ResistanceReport report;
  report.edges = g.edge_keys();
  report.per_edge.reserve(g.edge_count());
  for (const auto &e : g.edges()) {
    const double r = resistance_distance(P, e.key.u, e.key.v);
    report.per_edge.push_back(r);
    report.foster_sum += e.weight * r;
  }
  return report;
}

} // namespace fosterflow
