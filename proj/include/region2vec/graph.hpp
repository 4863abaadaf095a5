#pragma once

#include "region2vec/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace region2vec {

// Spatial graph over n regions: binary rook-style adjacency plus the all-pairs
// hop-count matrix. Disconnected pairs carry the sentinel value n, an
// unreachable upper bound that keeps hop-based loss weights finite.
struct SpatialGraph {
  int n = 0;
  std::vector<std::string> node_ids;
  Matrix adjacency;  // n x n, entries in {0,1}, symmetric, zero diagonal
  IntMatrix hop;     // n x n shortest-path hop counts, sentinel n when unreachable

  /// Validates adjacency, computes hops, and assembles the graph.
  static SpatialGraph build(std::vector<std::string> node_ids, Matrix adjacency);

  void validate() const;
};

/// Nonnegative symmetric flow intensities with zero diagonal.
struct FlowMatrix {
  Matrix s;

  int n() const { return static_cast<int>(s.rows()); }
  void validate() const;
};

struct PositivePair {
  int i;
  int j;
  double flow;
};

// Unordered node pairs split by flow: s_ij > 0 attracts, s_ij = 0 repels.
// Together the two lists cover all n(n-1)/2 pairs.
struct PairSet {
  std::vector<PositivePair> positive;
  std::vector<std::pair<int, int>> negative;

  int n_pos() const { return static_cast<int>(positive.size()); }
  int n_neg() const { return static_cast<int>(negative.size()); }
};

/// Symmetric renormalization with self-loops: D^{-1/2} (A + I) D^{-1/2}.
Matrix normalize_adjacency(const SpatialGraph& graph);

/// BFS shortest-path hop counts from every source; unreachable pairs get n.
IntMatrix all_pairs_hops(const Matrix& adjacency);

/// Splits all unordered pairs into positive (flow > 0) and negative (flow = 0).
/// Throws EmptyGraph when n < 2.
PairSet extract_pairs(const FlowMatrix& flows);

}  // namespace region2vec
