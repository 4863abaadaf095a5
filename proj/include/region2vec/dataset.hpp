#pragma once

#include "region2vec/graph.hpp"
#include "region2vec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace region2vec {

struct AttributeMatrix {
  Matrix x;
  bool standardized = false;

  int rows() const { return static_cast<int>(x.rows()); }
  int cols() const { return static_cast<int>(x.cols()); }
};

// A full problem instance: spatial graph, flows, standardized attributes, the
// raw poverty share per node, and (optionally) planted ground-truth communities.
struct Dataset {
  SpatialGraph graph;
  FlowMatrix flows;
  AttributeMatrix attributes;      // standardized; column 0 is the poverty share
  Matrix raw_attributes;           // as ingested, used when writing back out
  std::vector<std::string> attribute_names;
  Vector poverty_share;            // raw proportions in [0,1]
  std::optional<CommunityAssignment> ground_truth;

  int n() const { return graph.n; }
  void validate() const;
};

struct SynthConfig {
  int grid_rows = 10;
  int grid_cols = 10;
  int k_true = 5;
  double intra_flow_mean = 15.0;
  double inter_flow_mean = 1.0;
  int attribute_dims = 4;
  double attribute_separation = 1.0;
  std::uint64_t seed = 7;

  void validate() const;  // throws InvalidConfig
};

/// Per-column z-score with population variance; constant columns become zeros.
AttributeMatrix standardize(const Matrix& raw);

/// Loads a dataset from the CSV schema (nodes, adjacency edge list, flow edge
/// list, optional ground truth). Flows are symmetrized by s + s^T, adjacency by
/// logical-or, attributes standardized. Node order follows the nodes file.
Dataset load_dataset(const std::string& nodes_path, const std::string& adjacency_path,
                     const std::string& flows_path,
                     const std::string& ground_truth_path = std::string());

/// Writes nodes.csv, adjacency.csv, flows.csv and (when present)
/// ground_truth.csv into `dir` in the canonical round-trippable form.
void write_dataset(const Dataset& dataset, const std::string& dir);

/// Seeded rook-grid generator with planted rectangular communities, Poisson
/// flows (intra >> inter), Gaussian attribute blobs, and per-community poverty
/// levels drawn from distinct Beta modes.
Dataset generate_synthetic(const SynthConfig& config);

/// Labels CSV (node_id,community). Reading validates ids against `graph` and
/// densifies labels to 1..K.
void write_labels_csv(const SpatialGraph& graph, const CommunityAssignment& assignment,
                      const std::string& path);
CommunityAssignment read_labels_csv(const SpatialGraph& graph, const std::string& path);

/// Embeddings CSV (node_id plus one column per dimension).
void write_embeddings_csv(const SpatialGraph& graph, const Matrix& z, const std::string& path);
Matrix read_embeddings_csv(const SpatialGraph& graph, const std::string& path);

/// Shortest round-trip decimal form of a double (plain CSV cell).
std::string format_double(double value);

}  // namespace region2vec
