#pragma once

#include <array>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvature_flow.hpp"
#include "detector.hpp"
#include "graph.hpp"

namespace fosterflow {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Graph plus the optional planted partition carried by a graph file.
struct GraphDocument {
  WeightedGraph graph;
  std::optional<Partition> partition;

  friend bool operator==(const GraphDocument &, const GraphDocument &) = default;
};

inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Text format:
///
///     nodes <n>
///     <u> <v> <w>          one line per edge, u < v
///     partition <l_0> ... <l_{n-1}>   optional, last
///
/// Blank lines are ignored.
inline void write_graph_file(std::ostream &os, const GraphDocument &doc) {
  os << "nodes " << doc.graph.node_count() << '\n';
  for (const auto &e : doc.graph.edges())
    os << e.key.u << ' ' << e.key.v << ' ' << format_real(e.weight) << '\n';
  if (doc.partition) {
    os << "partition";
    for (int l : doc.partition->labels) os << ' ' << l;
    os << '\n';
  }
}

inline GraphDocument read_graph_file(std::istream &is) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string &msg) -> ParseError {
    return ParseError("line " + std::to_string(line_no) + ": " + msg);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError("empty graph file");
  std::size_t n = 0;
  {
    std::istringstream ss(line);
    std::string tag;
    long long count = -1;
    std::string rest;
    if (!(ss >> tag >> count) || tag != "nodes" || count < 0 || (ss >> rest))
      throw fail("expected header 'nodes <n>'");
    n = static_cast<std::size_t>(count);
  }

  std::vector<Edge> edges;
  std::optional<Partition> partition;
  while (next_line()) {
    if (partition) throw fail("content after partition section");
    std::istringstream ss(line);
    std::string first;
    ss >> first;
    if (first == "partition") {
      Partition p;
      long long l;
      while (ss >> l) p.labels.push_back(static_cast<int>(l));
      if (!ss.eof()) throw fail("malformed partition label");
      if (p.labels.size() != n)
        throw fail("partition has " + std::to_string(p.labels.size()) +
                   " labels, expected " + std::to_string(n));
      partition = std::move(p);
      continue;
    }
    std::istringstream es(line);
    long long u = -1, v = -1;
    double w = 0.0;
    std::string rest;
    if (!(es >> u >> v >> w) || (es >> rest)) throw fail("expected edge line 'u v w'");
    if (u < 0 || v < 0) throw fail("negative node id");
    if (u == v) throw fail("self-loop at node " + std::to_string(u));
    edges.push_back({EdgeKey(static_cast<NodeId>(u), static_cast<NodeId>(v)), w});
  }
  try {
    return {WeightedGraph(n, std::move(edges)), std::move(partition)};
  } catch (const std::invalid_argument &ex) {
    throw ParseError(ex.what());
  }
}

/// Per-cycle summary as stored in a result file.
struct CycleSummary {
  std::size_t cycle_index = 0;
  std::array<double, 2> means{};
  std::array<double, 2> variances{};
  std::array<double, 2> mixture_weights{};
  std::optional<double> t_statistic;
  std::optional<double> p_value;
  std::size_t removed_edge_count = 0;
  std::size_t component_count_after = 0;
  bool degenerate = false;

  friend bool operator==(const CycleSummary &, const CycleSummary &) = default;
};

struct ResultDocument {
  Partition partition;
  Termination termination = Termination::max_cycles_reached;
  std::vector<CycleSummary> cycles;
  DetectorConfig config;
  std::optional<double> ari;

  friend bool operator==(const ResultDocument &, const ResultDocument &) = default;
};

inline ResultDocument summarize(const DetectionResult &r, const DetectorConfig &cfg,
                                std::optional<double> ari = std::nullopt) {
  ResultDocument doc{r.partition, r.termination, {}, cfg, ari};
  for (const auto &c : r.cycles) {
    CycleSummary s;
    s.cycle_index = c.cycle_index;
    s.means = c.gmm.means;
    s.variances = c.gmm.variances;
    s.mixture_weights = c.gmm.mixture_weights;
    if (c.separation) {
      s.t_statistic = c.separation->t_statistic;
      s.p_value = c.separation->p_value;
    }
    s.removed_edge_count = c.removed_edges.size();
    s.component_count_after = c.component_count_after;
    s.degenerate = c.degenerate;
    doc.cycles.push_back(s);
  }
  return doc;
}

using ordered_json = nlohmann::ordered_json;

namespace detail {

template <class T> ordered_json optional_json(const std::optional<T> &x) {
  return x ? ordered_json(*x) : ordered_json(nullptr);
}

template <class T> std::optional<T> optional_from(const ordered_json &j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

} // namespace detail

inline ordered_json to_json(const DetectorConfig &cfg) {
  return {{"eta", cfg.flow.eta},
          {"epsilon", cfg.flow.epsilon},
          {"flow_iters", cfg.flow.iterations},
          {"max_cycles", cfg.max_cycles},
          {"prune_side", std::string(to_string(cfg.prune_side))},
          {"gmm_tol", cfg.gmm_tol},
          {"gmm_max_iter", cfg.gmm_max_iter},
          {"gmm_restarts", cfg.gmm_restarts},
          {"seed", cfg.seed}};
}

inline DetectorConfig detector_config_from_json(const ordered_json &j) {
  DetectorConfig cfg;
  cfg.flow.eta = j.at("eta").get<double>();
  cfg.flow.epsilon = j.at("epsilon").get<double>();
  cfg.flow.iterations = j.at("flow_iters").get<std::size_t>();
  cfg.max_cycles = j.at("max_cycles").get<std::size_t>();
  cfg.prune_side = parse_prune_side(j.at("prune_side").get<std::string>());
  cfg.gmm_tol = j.at("gmm_tol").get<double>();
  cfg.gmm_max_iter = j.at("gmm_max_iter").get<std::size_t>();
  cfg.gmm_restarts = j.value("gmm_restarts", std::size_t{0});
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

inline ordered_json to_json(const ResultDocument &doc) {
  ordered_json cycles = ordered_json::array();
  for (const auto &c : doc.cycles)
    cycles.push_back({{"cycle_index", c.cycle_index},
                      {"gmm",
                       {{"means", c.means},
                        {"variances", c.variances},
                        {"mixture_weights", c.mixture_weights}}},
                      {"t_statistic", detail::optional_json(c.t_statistic)},
                      {"p_value", detail::optional_json(c.p_value)},
                      {"removed_edge_count", c.removed_edge_count},
                      {"component_count_after", c.component_count_after},
                      {"degenerate", c.degenerate}});
  ordered_json j = {{"partition", doc.partition.labels},
                    {"termination", std::string(to_string(doc.termination))},
                    {"cycles", std::move(cycles)},
                    {"config", to_json(doc.config)}};
  if (doc.ari) j["ari"] = *doc.ari;
  return j;
}

inline ResultDocument result_from_json(const ordered_json &j) {
  ResultDocument doc;
  doc.partition.labels = j.at("partition").get<std::vector<int>>();
  doc.termination = parse_termination(j.at("termination").get<std::string>());
  for (const auto &c : j.at("cycles")) {
    CycleSummary s;
    s.cycle_index = c.at("cycle_index").get<std::size_t>();
    s.means = c.at("gmm").at("means").get<std::array<double, 2>>();
    s.variances = c.at("gmm").at("variances").get<std::array<double, 2>>();
    s.mixture_weights = c.at("gmm").at("mixture_weights").get<std::array<double, 2>>();
    s.t_statistic = detail::optional_from<double>(c.at("t_statistic"));
    s.p_value = detail::optional_from<double>(c.at("p_value"));
    s.removed_edge_count = c.at("removed_edge_count").get<std::size_t>();
    s.component_count_after = c.at("component_count_after").get<std::size_t>();
    s.degenerate = c.value("degenerate", false);
    doc.cycles.push_back(s);
  }
  doc.config = detector_config_from_json(j.at("config"));
  if (j.contains("ari")) doc.ari = j.at("ari").get<double>();
  return doc;
}

inline std::string serialize_result(const ResultDocument &doc) {
  return to_json(doc).dump(2) + "\n";
}

inline ResultDocument parse_result(const std::string &text) {
  try {
    return result_from_json(ordered_json::parse(text));
  } catch (const nlohmann::json::exception &ex) {
    throw ParseError(std::string("malformed result file: ") + ex.what());
  }
}

/// CSV of pre-flow and post-flow weights with the curvature evaluated on
/// the post-flow weights, one row per edge in canonical order.
inline void write_histogram_csv(std::ostream &os, const WeightedGraph &before,
                                const WeightedGraph &after, const CurvatureMap &final_curvature) {
  os << "edge_u,edge_v,weight_before,weight_after,curvature_final\n";
  auto b = before.edges();
  auto a = after.edges();
  for (std::size_t i = 0; i < b.size(); ++i)
    os << b[i].key.u << ',' << b[i].key.v << ',' << format_real(b[i].weight) << ','
       << format_real(a[i].weight) << ',' << format_real(final_curvature.values[i]) << '\n';
}

} // namespace fosterflow
