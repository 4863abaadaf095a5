#pragma once

#include "region2vec/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace region2vec {

// One agglomerative merge. Cluster ids are the smallest original point index
// in each cluster. `violation` marks a merge that had to ignore the
// connectivity constraint because no connected pair remained.
struct MergeStep {
  int left;
  int right;
  double cost;  // Ward cost increment (within-cluster SSE increase)
  int size;     // merged cluster size
  bool violation = false;
};

struct WardResult {
  CommunityAssignment assignment;
  std::vector<MergeStep> merges;
};

/// Bottom-up Ward clustering restricted to cluster pairs connected in the
/// constraint graph (at least one adjacency edge between members). Uses the
/// Lance-Williams update; ties break on the lexicographically smallest
/// (left, right) cluster ids. Throws InvalidK when k is outside [1, n].
WardResult ward_constrained(const Matrix& points, const Matrix& adjacency, int k);

/// Lloyd iterations from k-means++ seeding until the assignment stops changing
/// (at most 300 rounds). Deterministic for a fixed seed.
CommunityAssignment kmeans(const Matrix& points, int k, std::uint64_t seed);

}  // namespace region2vec
