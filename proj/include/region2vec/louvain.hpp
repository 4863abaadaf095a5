#pragma once

#include "region2vec/graph.hpp"
#include "region2vec/rng.hpp"
#include "region2vec/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace region2vec {

struct LouvainResult {
  CommunityAssignment assignment;
  double modularity = 0.0;
  int levels = 0;  // aggregation passes performed
};

/// Newman weighted modularity of the partition on the flow graph.
/// Throws EmptyFlows when the total flow weight is zero.
double modularity(const FlowMatrix& flows, const CommunityAssignment& assignment);

/// Two-phase Louvain: local moving to a modularity fixpoint, then graph
/// aggregation, repeated until no move improves. Node visit order is shuffled
/// by the seeded RNG; everything else is deterministic.
LouvainResult louvain(const FlowMatrix& flows, std::uint64_t seed);

namespace detail {

// Weighted graph in the form the aggregation phase produces: sorted neighbor
// lists plus collapsed internal weight per node. Degrees count self weight twice.
struct WeightedGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> self_weight;
  std::vector<double> degree;
  double total_degree = 0.0;  // 2m

  int n() const { return static_cast<int>(adj.size()); }

  static WeightedGraph from_flows(const FlowMatrix& flows);
};

double graph_modularity(const WeightedGraph& g, const std::vector<int>& labels);

/// One local-moving phase; labels are community ids in [0, n). Returns the
/// number of moves made.
int local_move(const WeightedGraph& g, std::vector<int>& labels, Rng& rng);

}  // namespace detail

}  // namespace region2vec
