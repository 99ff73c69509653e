// Detects the two halves of a barbell graph and prints each pruning cycle.

#include <iostream>

#include <fosterflow/fosterflow.hpp>

int main() {
  namespace ff = fosterflow;
  std::vector<ff::Edge> edges;
  for (std::size_t c = 0; c < 2; ++c)
    for (ff::NodeId i = 0; i < 6; ++i)
      for (ff::NodeId j = i + 1; j < 6; ++j) edges.push_back({ff::EdgeKey(6 * c + i, 6 * c + j), 1.0});
  edges.push_back({ff::EdgeKey(5, 6), 1.0});
  const ff::WeightedGraph g(12, edges);

  const auto result = ff::detect_communities(g);
  for (const auto &c : result.cycles)
    std::cout << "cycle " << c.cycle_index << ": means " << c.gmm.means[0] << " / "
              << c.gmm.means[1] << ", removed " << c.removed_edges.size() << " edges, "
              << c.component_count_after << " components\n";
  std::cout << "termination: " << ff::to_string(result.termination) << "\npartition:";
  for (int l : result.partition.labels) std::cout << ' ' << l;
  std::cout << '\n';
}
