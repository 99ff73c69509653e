#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "resistance.hpp"

namespace fosterflow {

/// Clipped Foster-Ricci curvature per edge, aligned with the canonical edge
/// order of the graph it was computed on.
struct CurvatureMap {
  std::vector<EdgeKey> edges;
  std::vector<double> values;

  double at(EdgeKey key) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), key);
    if (it == edges.end() || *it != key)
      throw std::invalid_argument("edge not present in curvature map");
    return values[static_cast<std::size_t>(it - edges.begin())];
  }
};

struct FlowConfig {
  double eta = 0.3;
  double epsilon = 1e-6;
  std::size_t iterations = 15;

  void validate() const {
    if (!(eta > 0.0 && eta <= 1.0))
      throw std::invalid_argument("flow eta must lie in (0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("flow epsilon must be positive");
    if (iterations < 1) throw std::invalid_argument("flow iterations must be >= 1");
  }

  friend bool operator==(const FlowConfig &, const FlowConfig &) = default;
};

/// K_uv = 1/d_u + 1/d_v - R_uv / w_uv before clipping.
inline std::vector<double> raw_foster_curvature(const WeightedGraph &g,
                                                const ResistanceReport &resistance) {
  std::vector<double> k;
  k.reserve(g.edge_count());
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto &e = edges[i];
    const double du = g.degree(e.key.u);
    const double dv = g.degree(e.key.v);
    k.push_back(1.0 / du + 1.0 / dv - resistance.per_edge[i] / e.weight);
  }
  return k;
}

/// Raw curvature clipped to [-1, 1]. Requires a connected graph.
inline CurvatureMap foster_curvature(const WeightedGraph &g) {
  const ResistanceReport resistance = effective_resistances(g);
  CurvatureMap map{g.edge_keys(), raw_foster_curvature(g, resistance)};
  for (double &v : map.values) v = std::clamp(v, -1.0, 1.0);
  return map;
}

/// w <- max(epsilon, w (1 - eta kappa)), then every weight is rescaled so
/// the total equals |E|. The floor is not re-applied after rescaling.
inline WeightedGraph flow_step(const WeightedGraph &g, const CurvatureMap &kappa,
                               const FlowConfig &cfg) {
  if (kappa.edges.size() != g.edge_count() || kappa.values.size() != g.edge_count())
    throw std::invalid_argument("curvature map does not cover the graph's edge set");
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (kappa.edges[i] != edges[i].key)
      throw std::invalid_argument("curvature map does not cover the graph's edge set");
  if (edges.empty()) return g;

  std::vector<double> w(edges.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    w[i] = std::max(cfg.epsilon, edges[i].weight * (1.0 - cfg.eta * kappa.values[i]));
    sum += w[i];
  }
  const double scale = static_cast<double>(edges.size()) / sum;
  for (double &x : w) x *= scale;
  return g.with_weights(w);
}

struct FlowResult {
  WeightedGraph graph;
  std::vector<CurvatureMap> trace;
};

/// Called after each step with (iteration index, curvature used, graph after step).
using FlowObserver =
    std::function<void(std::size_t, const CurvatureMap &, const WeightedGraph &)>;

/// Applies cfg.iterations rounds of curvature + flow_step. Curvature is always
/// recomputed from the previous step's normalized weights.
inline FlowResult run_flow(const WeightedGraph &g, const FlowConfig &cfg,
                           bool keep_trace = true, const FlowObserver &observer = {}) {
  cfg.validate();
  FlowResult result{g, {}};
  if (keep_trace) result.trace.reserve(cfg.iterations);
  for (std::size_t t = 0; t < cfg.iterations; ++t) {
    CurvatureMap kappa = foster_curvature(result.graph);
    result.graph = flow_step(result.graph, kappa, cfg);
    if (observer) observer(t, kappa, result.graph);
    if (keep_trace) result.trace.push_back(std::move(kappa));
  }
  return result;
}

} // namespace fosterflow
