#include "region2vec/dataset.hpp"

#include "region2vec/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace region2vec {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_fields(line));
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, path + " is empty");
  return rows;
}

double parse_double(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::NonNumericAttribute, "bad numeric value '" + token + "' in " + context);
  }
  return value;
}

int parse_int(const std::string& token, const std::string& context) {
  int value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Parse, "bad integer '" + token + "' in " + context);
  }
  return value;
}

int node_index(const std::unordered_map<std::string, int>& index, const std::string& id,
               const std::string& context) {
  auto it = index.find(id);
  if (it == index.end()) {
    throw Error(ErrorCode::UnknownNodeId, "node '" + id + "' in " + context + " is not declared");
  }
  return it->second;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

void SynthConfig::validate() const {
  if (grid_rows < 1 || grid_cols < 1) {
    throw Error(ErrorCode::InvalidConfig, "grid dimensions must be positive");
  }
  if (k_true < 1 || k_true > grid_rows * grid_cols) {
    throw Error(ErrorCode::InvalidConfig, "k_true must be in [1, grid_rows*grid_cols]");
  }
  if (!(intra_flow_mean > inter_flow_mean) || !(inter_flow_mean > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "flow means must satisfy intra > inter > 0");
  }
  if (attribute_dims < 0) {
    throw Error(ErrorCode::InvalidConfig, "attribute_dims must be nonnegative");
  }
  if (attribute_separation < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "attribute_separation must be nonnegative");
  }
}

void Dataset::validate() const {
  graph.validate();
  flows.validate();
  if (flows.n() != graph.n || attributes.rows() != graph.n ||
      static_cast<int>(poverty_share.size()) != graph.n) {
    throw Error(ErrorCode::InvalidArgument, "dataset components disagree on node count");
  }
  if (ground_truth) ground_truth->validate();
}

AttributeMatrix standardize(const Matrix& raw) {
  const int n = static_cast<int>(raw.rows());
  const int m = static_cast<int>(raw.cols());
  Matrix x(n, m);
  for (int c = 0; c < m; ++c) {
    const double mean = raw.col(c).mean();
    double variance = 0.0;
    for (int r = 0; r < n; ++r) {
      const double d = raw(r, c) - mean;
      variance += d * d;
    }
    variance /= n;
    const double sigma = std::sqrt(variance);
    if (sigma <= 1e-12 * (1.0 + std::abs(mean))) {
      x.col(c).setZero();
    } else {
      for (int r = 0; r < n; ++r) x(r, c) = (raw(r, c) - mean) / sigma;
    }
  }
  return AttributeMatrix{std::move(x), true};
}

Dataset load_dataset(const std::string& nodes_path, const std::string& adjacency_path,
                     const std::string& flows_path, const std::string& ground_truth_path) {
  const auto node_rows = read_csv(nodes_path);
  const auto& header = node_rows.front();
  if (header.empty() || header[0] != "node_id") {
    throw Error(ErrorCode::Parse, nodes_path + ": first column must be node_id");
  }
  if (header.size() < 2 || header[1] != "poverty_share") {
    throw Error(ErrorCode::MissingPovertyColumn,
                nodes_path + ": second column must be poverty_share");
  }
  const int m = static_cast<int>(header.size()) - 1;  // poverty plus attributes
  const int n = static_cast<int>(node_rows.size()) - 1;
  if (n < 1) throw Error(ErrorCode::Parse, nodes_path + " declares no nodes");

  std::vector<std::string> node_ids(n);
  std::unordered_map<std::string, int> index;
  Matrix raw(n, m);
  Vector poverty(n);
  for (int r = 0; r < n; ++r) {
    const auto& row = node_rows[r + 1];
    if (static_cast<int>(row.size()) != m + 1) {
      throw Error(ErrorCode::Parse, nodes_path + ": row " + std::to_string(r + 2) +
                                        " has wrong field count");
    }
    node_ids[r] = row[0];
    if (!index.emplace(row[0], r).second) {
      throw Error(ErrorCode::Parse, nodes_path + ": duplicate node id '" + row[0] + "'");
    }
    for (int c = 0; c < m; ++c) {
      raw(r, c) = parse_double(row[c + 1], nodes_path);
    }
    poverty(r) = raw(r, 0);
    if (poverty(r) < 0.0 || poverty(r) > 1.0) {
      throw Error(ErrorCode::Parse,
                  nodes_path + ": poverty_share for '" + row[0] + "' outside [0,1]");
    }
  }

  const auto adj_rows = read_csv(adjacency_path);
  if (adj_rows.front() != std::vector<std::string>{"src", "dst"}) {
    throw Error(ErrorCode::Parse, adjacency_path + ": header must be src,dst");
  }
  Matrix adjacency = Matrix::Zero(n, n);
  std::set<std::pair<int, int>> seen_edges;
  for (std::size_t r = 1; r < adj_rows.size(); ++r) {
    const auto& row = adj_rows[r];
    if (row.size() != 2) {
      throw Error(ErrorCode::Parse, adjacency_path + ": row " + std::to_string(r + 1) +
                                        " has wrong field count");
    }
    const int a = node_index(index, row[0], adjacency_path);
    const int b = node_index(index, row[1], adjacency_path);
    if (a == b) {
      throw Error(ErrorCode::Parse, adjacency_path + ": self edge on '" + row[0] + "'");
    }
    if (!seen_edges.emplace(std::min(a, b), std::max(a, b)).second) {
      throw Error(ErrorCode::DuplicateEdge,
                  adjacency_path + ": edge " + row[0] + "," + row[1] + " listed twice");
    }
    adjacency(a, b) = 1.0;  // logical-or symmetrization
    adjacency(b, a) = 1.0;
  }

  const auto flow_rows = read_csv(flows_path);
  if (flow_rows.front() != std::vector<std::string>{"src", "dst", "weight"}) {
    throw Error(ErrorCode::Parse, flows_path + ": header must be src,dst,weight");
  }
  Matrix directed = Matrix::Zero(n, n);
  std::set<std::pair<int, int>> seen_flows;
  for (std::size_t r = 1; r < flow_rows.size(); ++r) {
    const auto& row = flow_rows[r];
    if (row.size() != 3) {
      throw Error(ErrorCode::Parse,
                  flows_path + ": row " + std::to_string(r + 1) + " has wrong field count");
    }
    const int a = node_index(index, row[0], flows_path);
    const int b = node_index(index, row[1], flows_path);
    const double w = parse_double(row[2], flows_path);
    if (!(w > 0.0)) {
      throw Error(ErrorCode::Parse, flows_path + ": weight must be positive, got " + row[2]);
    }
    if (!seen_flows.emplace(a, b).second) {
      throw Error(ErrorCode::DuplicateEdge,
                  flows_path + ": flow " + row[0] + "," + row[1] + " listed twice");
    }
    if (a == b) continue;  // self-flows removed
    directed(a, b) += w;
  }
  Matrix s = directed + directed.transpose();
  // Positive intensities below 1 would get a negative log weight in the loss;
  // ingestion raises them to the neutral value 1.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (s(i, j) > 0.0 && s(i, j) < 1.0) s(i, j) = 1.0;
    }
  }

  Dataset dataset;
  dataset.graph = SpatialGraph::build(node_ids, std::move(adjacency));
  dataset.flows = FlowMatrix{std::move(s)};
  dataset.raw_attributes = raw;
  dataset.attributes = standardize(raw);
  dataset.attribute_names.assign(header.begin() + 1, header.end());
  dataset.poverty_share = std::move(poverty);

  if (!ground_truth_path.empty()) {
    dataset.ground_truth = read_labels_csv(dataset.graph, ground_truth_path);
  }
  dataset.validate();
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const int n = dataset.n();

  auto nodes = open_out(dir + "/nodes.csv");
  nodes << "node_id";
  for (const auto& name : dataset.attribute_names) nodes << "," << name;
  nodes << "\n";
  for (int i = 0; i < n; ++i) {
    nodes << dataset.graph.node_ids[i];
    for (int c = 0; c < dataset.raw_attributes.cols(); ++c) {
      nodes << "," << format_double(dataset.raw_attributes(i, c));
    }
    nodes << "\n";
  }

  auto adjacency = open_out(dir + "/adjacency.csv");
  adjacency << "src,dst\n";
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dataset.graph.adjacency(i, j) != 0.0) {
        adjacency << dataset.graph.node_ids[i] << "," << dataset.graph.node_ids[j] << "\n";
      }
    }
  }

  auto flows = open_out(dir + "/flows.csv");
  flows << "src,dst,weight\n";
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dataset.flows.s(i, j) > 0.0) {
        flows << dataset.graph.node_ids[i] << "," << dataset.graph.node_ids[j] << ","
              << format_double(dataset.flows.s(i, j)) << "\n";
      }
    }
  }

  if (dataset.ground_truth) {
    write_labels_csv(dataset.graph, *dataset.ground_truth, dir + "/ground_truth.csv");
  }
}

Dataset generate_synthetic(const SynthConfig& config) {
  config.validate();
  const int rows = config.grid_rows;
  const int cols = config.grid_cols;
  const int n = rows * cols;
  const int k = config.k_true;
  Rng rng(config.seed);

  // Tile the grid into k rectangles: near-square row bands, columns split
  // within each band.
  int bands = std::clamp(
      static_cast<int>(std::lround(std::sqrt(static_cast<double>(k) * rows / cols))), 1,
      std::min(rows, k));
  while ((k + bands - 1) / bands > cols) ++bands;
  std::vector<int> tiles_per_band(bands, k / bands);
  for (int b = 0; b < k % bands; ++b) ++tiles_per_band[b];

  std::vector<int> community(n);
  int tile = 0;
  int row_start = 0;
  for (int b = 0; b < bands; ++b) {
    const int band_rows = rows / bands + (b < rows % bands ? 1 : 0);
    const int t = tiles_per_band[b];
    int col_start = 0;
    for (int s = 0; s < t; ++s) {
      const int tile_cols = cols / t + (s < cols % t ? 1 : 0);
      for (int r = row_start; r < row_start + band_rows; ++r) {
        for (int c = col_start; c < col_start + tile_cols; ++c) {
          community[r * cols + c] = tile;
        }
      }
      col_start += tile_cols;
      ++tile;
    }
    row_start += band_rows;
  }

  std::vector<std::string> node_ids(n);
  for (int i = 0; i < n; ++i) node_ids[i] = "n" + std::to_string(i);

  Matrix adjacency = Matrix::Zero(n, n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) {
        adjacency(i, i + 1) = 1.0;
        adjacency(i + 1, i) = 1.0;
      }
      if (r + 1 < rows) {
        adjacency(i, i + cols) = 1.0;
        adjacency(i + cols, i) = 1.0;
      }
    }
  }

  // Poverty modes: evenly spaced across communities, forming a
  // socioeconomic gradient.
  std::vector<double> mode(k, 0.5);
  if (k > 1) {
    for (int c = 0; c < k; ++c) mode[c] = 0.2 + 0.6 * c / (k - 1);
  }

  // Attribute centers sit along a random direction, ordered by poverty mode,
  // so attribute similarity follows the socioeconomic gradient rather than
  // tile identity; mode-adjacent centers are attribute_separation noise units
  // apart, with a little per-community jitter off the line.
  const int dims = config.attribute_dims;
  Matrix centers = Matrix::Zero(k, std::max(dims, 1));
  if (dims > 0) {
    Vector direction(dims);
    for (int d = 0; d < dims; ++d) direction(d) = rng.normal();
    direction /= std::max(direction.norm(), 1e-12);
    const double gain =
        k > 1 ? config.attribute_separation * (k - 1) / 0.6 : 0.0;
    const double jitter = 0.25 * config.attribute_separation / std::sqrt(dims);
    for (int c = 0; c < k; ++c) {
      const double offset = gain * (mode[c] - 0.5);
      for (int d = 0; d < dims; ++d) {
        centers(c, d) = direction(d) * offset + jitter * rng.normal();
      }
    }
  }

  // Each node's poverty share comes from its community's Beta mode; the
  // concentration keeps neighbouring modes overlapping so communities are
  // socioeconomically distinct but not separable from poverty alone.
  const double poverty_concentration = 3.5;
  Matrix raw(n, 1 + dims);
  Vector poverty(n);
  for (int i = 0; i < n; ++i) {
    const int c = community[i];
    poverty(i) = rng.beta(1.0 + mode[c] * poverty_concentration,
                          1.0 + (1.0 - mode[c]) * poverty_concentration);
    raw(i, 0) = poverty(i);
    for (int d = 0; d < dims; ++d) {
      raw(i, 1 + d) = centers(c, d) + rng.normal();
    }
  }

  // Flows: all nearby intra-community pairs interact; a sample of nearby
  // cross-community pairs leaks flow across borders.
  const int flow_radius = 3;
  const double inter_rate = 0.35;
  Matrix s = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int ri = i / cols;
    const int ci = i % cols;
    for (int j = i + 1; j < n; ++j) {
      const int manhattan = std::abs(ri - j / cols) + std::abs(ci - j % cols);
      if (manhattan > flow_radius) continue;
      double w = 0.0;
      if (community[i] == community[j]) {
        w = rng.poisson(config.intra_flow_mean);
      } else if (rng.uniform() < inter_rate) {
        w = rng.poisson(config.inter_flow_mean);
      }
      if (w > 0.0) {
        s(i, j) = w;
        s(j, i) = w;
      }
    }
  }

  Dataset dataset;
  dataset.graph = SpatialGraph::build(std::move(node_ids), std::move(adjacency));
  dataset.flows = FlowMatrix{std::move(s)};
  dataset.raw_attributes = raw;
  dataset.attributes = standardize(raw);
  dataset.attribute_names.push_back("poverty_share");
  for (int d = 1; d <= dims; ++d) dataset.attribute_names.push_back("a" + std::to_string(d));
  dataset.poverty_share = std::move(poverty);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = community[i] + 1;
  dataset.ground_truth = CommunityAssignment{std::move(labels), k};
  dataset.validate();
  return dataset;
}

void write_labels_csv(const SpatialGraph& graph, const CommunityAssignment& assignment,
                      const std::string& path) {
  if (assignment.size() != graph.n) {
    throw Error(ErrorCode::LengthMismatch, "assignment length does not match graph");
  }
  auto out = open_out(path);
  out << "node_id,community\n";
  for (int i = 0; i < graph.n; ++i) {
    out << graph.node_ids[i] << "," << assignment.labels[i] << "\n";
  }
}

CommunityAssignment read_labels_csv(const SpatialGraph& graph, const std::string& path) {
  const auto rows = read_csv(path);
  if (rows.front() != std::vector<std::string>{"node_id", "community"}) {
    throw Error(ErrorCode::Parse, path + ": header must be node_id,community");
  }
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < graph.n; ++i) index.emplace(graph.node_ids[i], i);
  std::vector<int> labels(graph.n, 0);
  std::vector<bool> seen(graph.n, false);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2) {
      throw Error(ErrorCode::Parse, path + ": row " + std::to_string(r + 1) +
                                        " has wrong field count");
    }
    const int i = node_index(index, row[0], path);
    if (seen[i]) throw Error(ErrorCode::Parse, path + ": node '" + row[0] + "' listed twice");
    seen[i] = true;
    const int label = parse_int(row[1], path);
    if (label < 1) throw Error(ErrorCode::Parse, path + ": community labels must be >= 1");
    labels[i] = label;
  }
  for (int i = 0; i < graph.n; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::Parse, path + ": node '" + graph.node_ids[i] + "' has no label");
    }
  }
  // Keep labels that are already dense 1..K so write/read round-trips exactly;
  // anything else is renumbered by first appearance.
  const int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<int> counts(max_label, 0);
  for (int label : labels) ++counts[label - 1];
  if (std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; })) {
    return CommunityAssignment{std::move(labels), max_label};
  }
  return CommunityAssignment::from_labels(std::move(labels));
}

void write_embeddings_csv(const SpatialGraph& graph, const Matrix& z, const std::string& path) {
  if (static_cast<int>(z.rows()) != graph.n) {
    throw Error(ErrorCode::LengthMismatch, "embedding rows do not match graph");
  }
  auto out = open_out(path);
  out << "node_id";
  for (int d = 0; d < z.cols(); ++d) out << ",z" << d;
  out << "\n";
  for (int i = 0; i < graph.n; ++i) {
    out << graph.node_ids[i];
    for (int d = 0; d < z.cols(); ++d) out << "," << format_double(z(i, d));
    out << "\n";
  }
}

Matrix read_embeddings_csv(const SpatialGraph& graph, const std::string& path) {
  const auto rows = read_csv(path);
  const auto& header = rows.front();
  if (header.empty() || header[0] != "node_id" || header.size() < 2) {
    throw Error(ErrorCode::Parse, path + ": header must be node_id,z0,...");
  }
  const int d = static_cast<int>(header.size()) - 1;
  if (static_cast<int>(rows.size()) - 1 != graph.n) {
    throw Error(ErrorCode::Parse, path + ": row count does not match graph");
  }
  Matrix z(graph.n, d);
  for (int i = 0; i < graph.n; ++i) {
    const auto& row = rows[i + 1];
    if (static_cast<int>(row.size()) != d + 1) {
      throw Error(ErrorCode::Parse, path + ": row " + std::to_string(i + 2) +
                                        " has wrong field count");
    }
    if (row[0] != graph.node_ids[i]) {
      throw Error(ErrorCode::UnknownNodeId, path + ": expected node '" + graph.node_ids[i] +
                                                "' at row " + std::to_string(i + 2));
    }
    for (int c = 0; c < d; ++c) z(i, c) = parse_double(row[c + 1], path);
  }
  return z;
}

}  // namespace region2vec
