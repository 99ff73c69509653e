#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fosterflow {

using NodeId = std::size_t;

/// Unordered node pair stored canonically with u < v.
struct EdgeKey {
  NodeId u = 0;
  NodeId v = 0;

  EdgeKey() = default;
  EdgeKey(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend auto operator<=>(const EdgeKey &, const EdgeKey &) = default;
};

struct Edge {
  EdgeKey key;
  double weight = 1.0;

  friend bool operator==(const Edge &, const Edge &) = default;
};

/// One community label per node id. Labels only carry equality semantics.
struct Partition {
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t community_count() const {
    std::vector<int> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(
        std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  }

  friend bool operator==(const Partition &, const Partition &) = default;
};

/// Relabels a partition so labels are 0, 1, 2, ... in order of first
/// appearance. Two partitions that agree up to label permutation have equal
/// canonical forms.
inline Partition canonical(const Partition &p) {
  std::map<int, int> remap;
  Partition out;
  out.labels.reserve(p.labels.size());
  for (int l : p.labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.labels.push_back(it->second);
  }
  return out;
}

/// Undirected simple graph with strictly positive edge weights.
///
/// Values are immutable after construction; every mutation returns a new
/// graph. Edges are kept sorted by key, and that order is the canonical edge
/// order used by curvature maps, weight vectors and file output.
class WeightedGraph {
public:
  WeightedGraph() = default;

  /// Throws std::invalid_argument on self-loops, duplicate pairs,
  /// out-of-range endpoints or non-positive (or non-finite) weights.
  WeightedGraph(std::size_t node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    for (auto &e : edges_) {
      if (e.key.u == e.key.v)
        throw std::invalid_argument("self-loop at node " +
                                    std::to_string(e.key.u));
      e.key = EdgeKey(e.key.u, e.key.v);
      if (e.key.v >= node_count_)
        throw std::invalid_argument("edge endpoint " + std::to_string(e.key.v) +
                                    " out of range");
      if (!(e.weight > 0.0) || e.weight == std::numeric_limits<double>::infinity())
        throw std::invalid_argument("edge weight must be finite and positive");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge &a, const Edge &b) { return a.key < b.key; });
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i].key == edges_[i - 1].key)
        throw std::invalid_argument("duplicate edge (" +
                                    std::to_string(edges_[i].key.u) + "," +
                                    std::to_string(edges_[i].key.v) + ")");
    degrees_.assign(node_count_, 0.0);
    for (const auto &e : edges_) {
      degrees_[e.key.u] += e.weight;
      degrees_[e.key.v] += e.weight;
    }
  }

  /// Convenience: all edges with unit weight.
  static WeightedGraph unit(std::size_t node_count,
                            const std::vector<std::pair<NodeId, NodeId>> &pairs) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) edges.push_back({EdgeKey(a, b), 1.0});
    return WeightedGraph(node_count, std::move(edges));
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::vector<EdgeKey> edge_keys() const {
    std::vector<EdgeKey> keys;
    keys.reserve(edges_.size());
    for (const auto &e : edges_) keys.push_back(e.key);
    return keys;
  }

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(edges_.size());
    for (const auto &e : edges_) w.push_back(e.weight);
    return w;
  }

  double total_weight() const {
    double s = 0.0;
    for (const auto &e : edges_) s += e.weight;
    return s;
  }

  bool has_edge(NodeId a, NodeId b) const { return find(EdgeKey(a, b)) != npos; }

  /// Index of the edge in canonical order, or npos.
  std::size_t find(EdgeKey key) const {
    auto it = std::lower_bound(
        edges_.begin(), edges_.end(), key,
        [](const Edge &e, const EdgeKey &k) { return e.key < k; });
    if (it == edges_.end() || it->key != key) return npos;
    return static_cast<std::size_t>(it - edges_.begin());
  }

  double weight(NodeId a, NodeId b) const {
    std::size_t idx = find(EdgeKey(a, b));
    if (idx == npos)
      throw std::invalid_argument("no edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ")");
    return edges_[idx].weight;
  }

  /// Same topology, new weights in canonical edge order.
  WeightedGraph with_weights(std::span<const double> w) const {
    if (w.size() != edges_.size())
      throw std::invalid_argument("weight vector length does not match edge count");
    std::vector<Edge> edges = edges_;
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].weight = w[i];
    return WeightedGraph(node_count_, std::move(edges));
  }

  double degree(NodeId i) const {
    if (i >= node_count_)
      throw std::invalid_argument("node id " + std::to_string(i) + " out of range");
    return degrees_[i];
  }

  friend bool operator==(const WeightedGraph &a, const WeightedGraph &b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
};

/// Sum of incident edge weights; 0 for isolated nodes.
inline double weighted_degree(const WeightedGraph &g, NodeId i) { return g.degree(i); }

namespace detail {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace detail

/// Labels are assigned 0, 1, ... in order of each component's smallest node.
inline Partition connected_components(const WeightedGraph &g) {
  detail::DisjointSets sets(g.node_count());
  for (const auto &e : g.edges()) sets.unite(e.key.u, e.key.v);
  Partition p;
  p.labels.resize(g.node_count());
  std::vector<int> root_label(g.node_count(), -1);
  int next = 0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    std::size_t r = sets.find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    p.labels[i] = root_label[r];
  }
  return p;
}

inline std::size_t component_count(const WeightedGraph &g) {
  if (g.node_count() == 0) return 0;
  return connected_components(g).community_count();
}

inline bool is_connected(const WeightedGraph &g) { return component_count(g) == 1; }

/// Throws std::invalid_argument if any pair is not a current edge.
inline WeightedGraph remove_edges(const WeightedGraph &g,
                                  std::span<const EdgeKey> to_remove) {
  std::vector<bool> drop(g.edge_count(), false);
  for (const auto &key : to_remove) {
    std::size_t idx = g.find(key);
    if (idx == WeightedGraph::npos)
      throw std::invalid_argument("cannot remove missing edge (" +
                                  std::to_string(key.u) + "," +
                                  std::to_string(key.v) + ")");
    drop[idx] = true;
  }
  std::vector<Edge> kept;
  kept.reserve(g.edge_count());
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (!drop[i]) kept.push_back(edges[i]);
  return WeightedGraph(g.node_count(), std::move(kept));
}

} // namespace fosterflow
