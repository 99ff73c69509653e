#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "curvature_flow.hpp"
#include "errors.hpp"
#include "gmm.hpp"
#include "graph.hpp"

namespace fosterflow {

/// Which GMM component is cut in a pruning cycle. The flow pushes
/// inter-community edges to larger weights, so `high` is the default.
enum class PruneSide { high, low };

inline std::string_view to_string(PruneSide s) { return s == PruneSide::high ? "high" : "low"; }

inline PruneSide parse_prune_side(std::string_view s) {
  if (s == "high") return PruneSide::high;
  if (s == "low") return PruneSide::low;
  throw std::invalid_argument("prune side must be 'high' or 'low'");
}

struct DetectorConfig {
  FlowConfig flow;
  std::size_t max_cycles = 10;
  PruneSide prune_side = PruneSide::high;
  double gmm_tol = 1e-8;
  std::size_t gmm_max_iter = 500;
  std::size_t gmm_restarts = 0;
  std::uint64_t seed = 0;

  void validate() const {
    flow.validate();
    if (max_cycles < 1) throw std::invalid_argument("max_cycles must be >= 1");
    if (!(gmm_tol > 0.0)) throw std::invalid_argument("gmm_tol must be positive");
    if (gmm_max_iter < 1) throw std::invalid_argument("gmm_max_iter must be >= 1");
  }

  GmmOptions gmm_options() const { return {gmm_tol, gmm_max_iter, seed, gmm_restarts}; }

  friend bool operator==(const DetectorConfig &, const DetectorConfig &) = default;
};

struct CycleDiagnostics {
  std::size_t cycle_index = 0;
  std::vector<double> edge_weights_before;
  GmmFit gmm;
  std::optional<SeparationTest> separation;
  std::vector<EdgeKey> removed_edges;
  std::size_t component_count_after = 1;
  bool degenerate = false;
};

enum class Termination { disconnected, max_cycles_reached, degenerate_gmm };

inline std::string_view to_string(Termination t) {
  switch (t) {
  case Termination::disconnected: return "disconnected";
  case Termination::max_cycles_reached: return "max_cycles_reached";
  case Termination::degenerate_gmm: return "degenerate_gmm";
  }
  return "unknown";
}

inline Termination parse_termination(std::string_view s) {
  if (s == "disconnected") return Termination::disconnected;
  if (s == "max_cycles_reached") return Termination::max_cycles_reached;
  if (s == "degenerate_gmm") return Termination::degenerate_gmm;
  throw std::invalid_argument("unknown termination '" + std::string(s) + "'");
}

struct DetectionResult {
  Partition partition;
  std::vector<CycleDiagnostics> cycles;
  Termination termination = Termination::max_cycles_reached;
  WeightedGraph final_graph;
};

struct PruneOutcome {
  WeightedGraph graph;
  CycleDiagnostics diagnostics;
};

/// Fewest edges a pruning cycle will fit a mixture on.
inline constexpr std::size_t kMinPruneEdges = 4;

/// One GMM pruning cycle. A degenerate mixture, or a selection that would
/// remove no edges or every edge, leaves the graph unchanged and sets
/// diagnostics.degenerate so the caller stops.
inline PruneOutcome prune_cycle(const WeightedGraph &g, const DetectorConfig &cfg,
                                std::size_t cycle_index) {
  PruneOutcome out{g, {}};
  auto &diag = out.diagnostics;
  diag.cycle_index = cycle_index;
  diag.edge_weights_before = g.weights();
  diag.component_count_after = component_count(g);
  if (g.edge_count() < kMinPruneEdges) {
    diag.degenerate = true;
    diag.gmm.degenerate = true;
    return out;
  }

  diag.gmm = fit_gmm_1d(diag.edge_weights_before, cfg.gmm_options());
  if (diag.gmm.degenerate) {
    diag.degenerate = true;
    return out;
  }

  const auto labels = assign_components(diag.gmm, diag.edge_weights_before);
  const Component target =
      cfg.prune_side == PruneSide::high ? Component::high : Component::low;
  std::vector<double> low_w, high_w;
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    (labels[i] == Component::high ? high_w : low_w).push_back(edges[i].weight);
    if (labels[i] == target) diag.removed_edges.push_back(edges[i].key);
  }
  try {
    diag.separation = welch_t_test(low_w, high_w);
  } catch (const std::invalid_argument &) {
    diag.separation.reset();
  }

  if (diag.removed_edges.empty() || diag.removed_edges.size() == edges.size()) {
    diag.removed_edges.clear();
    diag.degenerate = true;
    return out;
  }
  out.graph = remove_edges(g, diag.removed_edges);
  diag.component_count_after = component_count(out.graph);
  return out;
}

namespace detail {

inline WeightedGraph renormalized(const WeightedGraph &g) {
  if (g.edge_count() == 0) return g;
  const double scale = static_cast<double>(g.edge_count()) / g.total_weight();
  std::vector<double> w = g.weights();
  for (double &x : w) x *= scale;
  return g.with_weights(w);
}

} // namespace detail

/// Flow, then alternate GMM pruning and re-flow until the graph splits,
/// the mixture stops separating, or max_cycles is hit. The partition is the
/// connected components of the final graph.
///
/// Throws DisconnectedGraphError for disconnected input and
/// PreconditionError when the input has fewer than 4 edges.
inline DetectionResult detect_communities(const WeightedGraph &g,
                                          const DetectorConfig &cfg = {},
                                          const FlowObserver &observer = {}) {
  cfg.validate();
  const std::size_t components = component_count(g);
  if (components != 1) throw DisconnectedGraphError(components);
  if (g.edge_count() < kMinPruneEdges)
    throw PreconditionError("community detection needs at least 4 edges");

  DetectionResult result;
  WeightedGraph current = run_flow(g, cfg.flow, false, observer).graph;
  result.termination = Termination::max_cycles_reached;
  for (std::size_t cycle = 0; cycle < cfg.max_cycles; ++cycle) {
    PruneOutcome step = prune_cycle(current, cfg, cycle);
    const bool degenerate = step.diagnostics.degenerate;
    const std::size_t after = step.diagnostics.component_count_after;
    result.cycles.push_back(std::move(step.diagnostics));
    current = std::move(step.graph);
    if (degenerate) {
      result.termination = Termination::degenerate_gmm;
      break;
    }
    if (after >= 2) {
      result.termination = Termination::disconnected;
      break;
    }
    if (cycle + 1 < cfg.max_cycles)
      current = run_flow(detail::renormalized(current), cfg.flow, false, observer).graph;
  }
  result.partition = connected_components(current);
  result.final_graph = std::move(current);
  return result;
}

} // namespace fosterflow
