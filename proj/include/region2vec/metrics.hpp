#pragma once

#include "region2vec/dataset.hpp"
#include "region2vec/graph.hpp"
#include "region2vec/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace region2vec {

struct MetricsReport {
  double flow_ratio = 0.0;
  double inequality_median = 0.0;
  std::vector<double> inequality_per_community;
  double cosine_mean = 0.0;
  double homogeneity = 0.0;
  std::optional<double> adjusted_rand;
};

struct InequalityResult {
  std::vector<double> per_community;  // indexed by community label - 1
  double median = 0.0;
};

/// Total intra-community flow over total inter-community flow, each unordered
/// pair counted once. Throws NoInterFlow when no flow crosses communities.
double flow_ratio(const FlowMatrix& flows, const CommunityAssignment& assignment);

/// Per-community sigma / sqrt(mu (1-mu)) of a bounded proportion, plus the
/// median across communities. Throws DegenerateMean when a community mean is 0 or 1.
InequalityResult inequality(const Vector& values, const CommunityAssignment& assignment);

/// Mean pairwise cosine similarity over intra-community pairs, pooled across
/// communities. Throws NoPairs when every community is a singleton.
double cosine_mean(const AttributeMatrix& attributes, const CommunityAssignment& assignment);

/// Entropy-based homogeneity 1 - H(class|cluster)/H(class) where classes come
/// from quantile-binning the poverty share. Returns 1 when H(class) = 0.
double homogeneity(const Vector& poverty_share, const CommunityAssignment& assignment,
                   int bins = 5);

/// Chance-corrected pair-counting agreement between two partitions.
double adjusted_rand(const CommunityAssignment& a, const CommunityAssignment& b);

/// All metrics for one labeling of a dataset; adjusted Rand is filled when a
/// reference partition is given.
MetricsReport evaluate(const Dataset& dataset, const CommunityAssignment& assignment,
                       int bins = 5, const CommunityAssignment* reference = nullptr);

/// Flat JSON object, keys sorted, stable formatting.
std::string report_to_json(const MetricsReport& report);

}  // namespace region2vec
