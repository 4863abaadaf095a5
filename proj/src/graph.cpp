#include "region2vec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace region2vec {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "core.InvalidArgument";
    case ErrorCode::Io: return "core.Io";
    case ErrorCode::Parse: return "data-io.Parse";
    case ErrorCode::EmptyGraph: return "graph-core.EmptyGraph";
    case ErrorCode::ShapeMismatch: return "embedding.ShapeMismatch";
    case ErrorCode::NoPositivePairs: return "embedding.NoPositivePairs";
    case ErrorCode::NoDenominator: return "embedding.NoDenominator";
    case ErrorCode::NonFiniteLoss: return "embedding.NonFiniteLoss";
    case ErrorCode::InvalidK: return "clustering.InvalidK";
    case ErrorCode::EmptyFlows: return "baselines.EmptyFlows";
    case ErrorCode::NoInterFlow: return "metrics.NoInterFlow";
    case ErrorCode::DegenerateMean: return "metrics.DegenerateMean";
    case ErrorCode::NoPairs: return "metrics.NoPairs";
    case ErrorCode::LengthMismatch: return "metrics.LengthMismatch";
    case ErrorCode::UnknownNodeId: return "data-io.UnknownNodeId";
    case ErrorCode::DuplicateEdge: return "data-io.DuplicateEdge";
    case ErrorCode::NonNumericAttribute: return "data-io.NonNumericAttribute";
    case ErrorCode::MissingPovertyColumn: return "data-io.MissingPovertyColumn";
    case ErrorCode::InvalidConfig: return "data-io.InvalidConfig";
    case ErrorCode::ConfigError: return "cli.ConfigError";
  }
  return "core.Unknown";
}

void CommunityAssignment::validate() const {
  if (k < 1 || static_cast<int>(labels.size()) < k) {
    throw Error(ErrorCode::InvalidArgument, "community count k must satisfy 1 <= k <= n");
  }
  std::vector<int> counts(k, 0);
  for (int label : labels) {
    if (label < 1 || label > k) {
      throw Error(ErrorCode::InvalidArgument,
                  "label " + std::to_string(label) + " outside {1.." + std::to_string(k) + "}");
    }
    ++counts[label - 1];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::InvalidArgument, "community " + std::to_string(c + 1) + " is empty");
    }
  }
}

CommunityAssignment CommunityAssignment::from_labels(std::vector<int> raw) {
  std::unordered_map<int, int> dense;
  std::vector<int> labels(raw.size());
  int next = 1;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = dense.try_emplace(raw[i], next);
    if (inserted) ++next;
    labels[i] = it->second;
  }
  CommunityAssignment assignment{std::move(labels), next - 1};
  assignment.validate();
  return assignment;
}

void SpatialGraph::validate() const {
  if (n < 1) throw Error(ErrorCode::EmptyGraph, "graph has no nodes");
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "adjacency shape does not match node count");
  }
  if (static_cast<int>(node_ids.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "node id list does not match node count");
  }
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "adjacency diagonal must be zero");
    }
    for (int j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "adjacency entries must be 0 or 1");
      }
      if (a != adjacency(j, i)) {
        throw Error(ErrorCode::InvalidArgument, "adjacency must be symmetric");
      }
    }
  }
}

SpatialGraph SpatialGraph::build(std::vector<std::string> node_ids, Matrix adjacency) {
  SpatialGraph graph;
  graph.n = static_cast<int>(adjacency.rows());
  graph.node_ids = std::move(node_ids);
  graph.adjacency = std::move(adjacency);
  graph.validate();
  graph.hop = all_pairs_hops(graph.adjacency);
  return graph;
}

void FlowMatrix::validate() const {
  const int size = n();
  if (s.cols() != size) throw Error(ErrorCode::InvalidArgument, "flow matrix must be square");
  for (int i = 0; i < size; ++i) {
    if (s(i, i) != 0.0) throw Error(ErrorCode::InvalidArgument, "flow diagonal must be zero");
    for (int j = 0; j < size; ++j) {
      if (s(i, j) < 0.0) throw Error(ErrorCode::InvalidArgument, "flows must be nonnegative");
      if (s(i, j) != s(j, i)) throw Error(ErrorCode::InvalidArgument, "flows must be symmetric");
    }
  }
}

Matrix normalize_adjacency(const SpatialGraph& graph) {
  const int n = graph.n;
  Vector inv_sqrt_degree(n);
  for (int i = 0; i < n; ++i) {
    // Self-loop guarantees a positive degree.
    inv_sqrt_degree(i) = 1.0 / std::sqrt(graph.adjacency.row(i).sum() + 1.0);
  }
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double tilde = (i == j) ? 1.0 : graph.adjacency(i, j);
      out(i, j) = tilde * inv_sqrt_degree(i) * inv_sqrt_degree(j);
    }
  }
  return out;
}

IntMatrix all_pairs_hops(const Matrix& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adjacency(i, j) != 0.0) neighbors[i].push_back(j);
    }
  }
  IntMatrix hop(n, n);
  hop.setConstant(n);  // sentinel for unreachable pairs
  std::vector<int> queue(n);
  for (int source = 0; source < n; ++source) {
    hop(source, source) = 0;
    int head = 0;
    int tail = 0;
    queue[tail++] = source;
    while (head < tail) {
      const int u = queue[head++];
      const int next = hop(source, u) + 1;
      for (int v : neighbors[u]) {
        if (hop(source, v) == n && v != source) {
          hop(source, v) = next;
          queue[tail++] = v;
        }
      }
    }
  }
  return hop;
}

PairSet extract_pairs(const FlowMatrix& flows) {
  const int n = flows.n();
  if (n < 2) throw Error(ErrorCode::EmptyGraph, "pair extraction needs at least two nodes");
  PairSet pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (flows.s(i, j) > 0.0) {
        pairs.positive.push_back({i, j, flows.s(i, j)});
      } else {
        pairs.negative.emplace_back(i, j);
      }
    }
  }
  return pairs;
}

}  // namespace region2vec
