#include "region2vec.h"

#include "region2vec/clustering.hpp"
#include "region2vec/dataset.hpp"
#include "region2vec/embedding.hpp"
#include "region2vec/louvain.hpp"
#include "region2vec/metrics.hpp"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

using namespace region2vec;

struct r2v_dataset {
  Dataset data;
};

struct r2v_matrix {
  Matrix data;
};

struct r2v_labels {
  CommunityAssignment data;
};

namespace {

thread_local std::string g_last_error;

int status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return R2V_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return R2V_ERR_IO;
    case ErrorCode::Parse: return R2V_ERR_PARSE;
    case ErrorCode::EmptyGraph: return R2V_ERR_EMPTY_GRAPH;
    case ErrorCode::ShapeMismatch: return R2V_ERR_SHAPE_MISMATCH;
    case ErrorCode::NoPositivePairs: return R2V_ERR_NO_POSITIVE_PAIRS;
    case ErrorCode::NoDenominator: return R2V_ERR_NO_DENOMINATOR;
    case ErrorCode::NonFiniteLoss: return R2V_ERR_NON_FINITE_LOSS;
    case ErrorCode::InvalidK: return R2V_ERR_INVALID_K;
    case ErrorCode::EmptyFlows: return R2V_ERR_EMPTY_FLOWS;
    case ErrorCode::NoInterFlow: return R2V_ERR_NO_INTER_FLOW;
    case ErrorCode::DegenerateMean: return R2V_ERR_DEGENERATE_MEAN;
    case ErrorCode::NoPairs: return R2V_ERR_NO_PAIRS;
    case ErrorCode::LengthMismatch: return R2V_ERR_LENGTH_MISMATCH;
    case ErrorCode::UnknownNodeId: return R2V_ERR_UNKNOWN_NODE_ID;
    case ErrorCode::DuplicateEdge: return R2V_ERR_DUPLICATE_EDGE;
    case ErrorCode::NonNumericAttribute: return R2V_ERR_NON_NUMERIC_ATTRIBUTE;
    case ErrorCode::MissingPovertyColumn: return R2V_ERR_MISSING_POVERTY_COLUMN;
    case ErrorCode::InvalidConfig: return R2V_ERR_INVALID_CONFIG;
    case ErrorCode::ConfigError: return R2V_ERR_CONFIG;
  }
  return R2V_ERR_UNKNOWN;
}

/// Runs fn, translating exceptions into status codes and the thread-local
/// error message. All API entry points funnel through here.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return R2V_OK;
  } catch (const Error& e) {
    g_last_error = e.what();  // already carries the qualified name
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return R2V_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return R2V_ERR_UNKNOWN;
  }
}

int require(bool ok, const char* what) {
  if (ok) return R2V_OK;
  g_last_error = std::string(error_name(ErrorCode::InvalidArgument)) + ": " + what;
  return R2V_ERR_INVALID_ARGUMENT;
}

void write_trace(const std::vector<TraceRow>& trace, const char* path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, std::string("cannot write ") + path);
  out << "iteration,total,numerator,negative_term,hop_term\n";
  for (const auto& row : trace) {
    out << row.iteration << "," << format_double(row.loss.total) << ","
        << format_double(row.loss.numerator) << "," << format_double(row.loss.negative_term)
        << "," << format_double(row.loss.hop_term) << "\n";
  }
}

}  // namespace

extern "C" {

const char* r2v_last_error(void) { return g_last_error.c_str(); }

void r2v_synth_config_default(r2v_synth_config* config) {
  if (!config) return;
  const SynthConfig defaults;
  config->grid_rows = defaults.grid_rows;
  config->grid_cols = defaults.grid_cols;
  config->k_true = defaults.k_true;
  config->intra_flow_mean = defaults.intra_flow_mean;
  config->inter_flow_mean = defaults.inter_flow_mean;
  config->attribute_dims = defaults.attribute_dims;
  config->attribute_separation = defaults.attribute_separation;
  config->seed = defaults.seed;
}

int r2v_dataset_load(const char* nodes_csv, const char* adjacency_csv, const char* flows_csv,
                     const char* ground_truth_csv, r2v_dataset** out) {
  if (int rc = require(nodes_csv && adjacency_csv && flows_csv && out,
                       "r2v_dataset_load: NULL argument")) {
    return rc;
  }
  return guarded([&] {
    *out = new r2v_dataset{load_dataset(nodes_csv, adjacency_csv, flows_csv,
                                        ground_truth_csv ? ground_truth_csv : "")};
  });
}

int r2v_dataset_generate(const r2v_synth_config* config, r2v_dataset** out) {
  if (int rc = require(config && out, "r2v_dataset_generate: NULL argument")) return rc;
  return guarded([&] {
    SynthConfig cfg;
    cfg.grid_rows = config->grid_rows;
    cfg.grid_cols = config->grid_cols;
    cfg.k_true = config->k_true;
    cfg.intra_flow_mean = config->intra_flow_mean;
    cfg.inter_flow_mean = config->inter_flow_mean;
    cfg.attribute_dims = config->attribute_dims;
    cfg.attribute_separation = config->attribute_separation;
    cfg.seed = config->seed;
    *out = new r2v_dataset{generate_synthetic(cfg)};
  });
}

int r2v_dataset_write(const r2v_dataset* dataset, const char* dir) {
  if (int rc = require(dataset && dir, "r2v_dataset_write: NULL argument")) return rc;
  return guarded([&] { write_dataset(dataset->data, dir); });
}

int r2v_dataset_node_count(const r2v_dataset* dataset, int* out) {
  if (int rc = require(dataset && out, "r2v_dataset_node_count: NULL argument")) return rc;
  *out = dataset->data.n();
  return R2V_OK;
}

int r2v_dataset_attributes(const r2v_dataset* dataset, r2v_matrix** out) {
  if (int rc = require(dataset && out, "r2v_dataset_attributes: NULL argument")) return rc;
  return guarded([&] { *out = new r2v_matrix{dataset->data.attributes.x}; });
}

int r2v_dataset_ground_truth(const r2v_dataset* dataset, r2v_labels** out) {
  if (int rc = require(dataset && out, "r2v_dataset_ground_truth: NULL argument")) return rc;
  return guarded([&] {
    *out = dataset->data.ground_truth ? new r2v_labels{*dataset->data.ground_truth} : nullptr;
  });
}

void r2v_dataset_free(r2v_dataset* dataset) { delete dataset; }

void r2v_training_config_default(r2v_training_config* config) {
  if (!config) return;
  const TrainingConfig defaults;
  config->hidden_width = defaults.hidden_width;
  config->output_width = defaults.output_width;
  config->layers = defaults.layers;
  config->hop_threshold = defaults.hop_threshold;
  config->iterations = defaults.iterations;
  config->learning_rate = defaults.learning_rate;
  config->adam_beta1 = defaults.adam_beta1;
  config->adam_beta2 = defaults.adam_beta2;
  config->adam_epsilon = defaults.adam_epsilon;
  config->seed = defaults.seed;
  config->distance_floor = defaults.distance_floor;
  config->pair_sample = defaults.pair_sample;
}

int r2v_train(const r2v_dataset* dataset, const r2v_training_config* config,
              const char* trace_csv, r2v_matrix** out) {
  if (int rc = require(dataset && config && out, "r2v_train: NULL argument")) return rc;
  return guarded([&] {
    TrainingConfig cfg;
    cfg.hidden_width = config->hidden_width;
    cfg.output_width = config->output_width;
    cfg.layers = config->layers;
    cfg.hop_threshold = config->hop_threshold;
    cfg.iterations = config->iterations;
    cfg.learning_rate = config->learning_rate;
    cfg.adam_beta1 = config->adam_beta1;
    cfg.adam_beta2 = config->adam_beta2;
    cfg.adam_epsilon = config->adam_epsilon;
    cfg.seed = config->seed;
    cfg.distance_floor = config->distance_floor;
    cfg.pair_sample = config->pair_sample;

    std::vector<TraceRow> trace;
    try {
      EmbeddingMatrix z = train(dataset->data.graph, dataset->data.flows,
                                dataset->data.attributes, cfg, trace_csv ? &trace : nullptr);
      if (trace_csv) write_trace(trace, trace_csv);
      *out = new r2v_matrix{std::move(z.z)};
    } catch (const Error&) {
      // A diverged run still leaves its partial trace behind for inspection.
      if (trace_csv && !trace.empty()) write_trace(trace, trace_csv);
      throw;
    }
  });
}

int r2v_ward_cluster(const r2v_dataset* dataset, const r2v_matrix* points, int k,
                     int* violations_out, r2v_labels** out) {
  if (int rc = require(dataset && points && out, "r2v_ward_cluster: NULL argument")) return rc;
  return guarded([&] {
    WardResult result = ward_constrained(points->data, dataset->data.graph.adjacency, k);
    if (violations_out) {
      int violations = 0;
      for (const auto& step : result.merges) violations += step.violation ? 1 : 0;
      *violations_out = violations;
    }
    *out = new r2v_labels{std::move(result.assignment)};
  });
}

int r2v_kmeans(const r2v_matrix* points, int k, unsigned long long seed, r2v_labels** out) {
  if (int rc = require(points && out, "r2v_kmeans: NULL argument")) return rc;
  return guarded([&] { *out = new r2v_labels{kmeans(points->data, k, seed)}; });
}

int r2v_louvain(const r2v_dataset* dataset, unsigned long long seed, double* modularity_out,
                int* levels_out, r2v_labels** out) {
  if (int rc = require(dataset && out, "r2v_louvain: NULL argument")) return rc;
  return guarded([&] {
    LouvainResult result = louvain(dataset->data.flows, seed);
    if (modularity_out) *modularity_out = result.modularity;
    if (levels_out) *levels_out = result.levels;
    *out = new r2v_labels{std::move(result.assignment)};
  });
}

int r2v_evaluate(const r2v_dataset* dataset, const r2v_labels* labels, int bins,
                 const r2v_labels* reference, r2v_metrics* out) {
  if (int rc = require(dataset && labels && out, "r2v_evaluate: NULL argument")) return rc;
  return guarded([&] {
    const MetricsReport report =
        evaluate(dataset->data, labels->data, bins, reference ? &reference->data : nullptr);
    out->flow_ratio = report.flow_ratio;
    out->inequality_median = report.inequality_median;
    out->cosine_mean = report.cosine_mean;
    out->homogeneity = report.homogeneity;
    out->has_adjusted_rand = report.adjusted_rand.has_value() ? 1 : 0;
    out->adjusted_rand = report.adjusted_rand.value_or(0.0);
  });
}

int r2v_evaluate_json(const r2v_dataset* dataset, const r2v_labels* labels, int bins,
                      const r2v_labels* reference, char** json_out) {
  if (int rc = require(dataset && labels && json_out, "r2v_evaluate_json: NULL argument")) {
    return rc;
  }
  return guarded([&] {
    const std::string json = report_to_json(
        evaluate(dataset->data, labels->data, bins, reference ? &reference->data : nullptr));
    char* buffer = new char[json.size() + 1];
    std::memcpy(buffer, json.c_str(), json.size() + 1);
    *json_out = buffer;
  });
}

void r2v_string_free(char* text) { delete[] text; }

int r2v_write_embeddings(const r2v_dataset* dataset, const r2v_matrix* z, const char* path) {
  if (int rc = require(dataset && z && path, "r2v_write_embeddings: NULL argument")) return rc;
  return guarded([&] { write_embeddings_csv(dataset->data.graph, z->data, path); });
}

int r2v_read_embeddings(const r2v_dataset* dataset, const char* path, r2v_matrix** out) {
  if (int rc = require(dataset && path && out, "r2v_read_embeddings: NULL argument")) return rc;
  return guarded([&] { *out = new r2v_matrix{read_embeddings_csv(dataset->data.graph, path)}; });
}

int r2v_write_labels(const r2v_dataset* dataset, const r2v_labels* labels, const char* path) {
  if (int rc = require(dataset && labels && path, "r2v_write_labels: NULL argument")) return rc;
  return guarded([&] { write_labels_csv(dataset->data.graph, labels->data, path); });
}

int r2v_read_labels(const r2v_dataset* dataset, const char* path, r2v_labels** out) {
  if (int rc = require(dataset && path && out, "r2v_read_labels: NULL argument")) return rc;
  return guarded([&] { *out = new r2v_labels{read_labels_csv(dataset->data.graph, path)}; });
}

int r2v_matrix_rows(const r2v_matrix* m) { return m ? static_cast<int>(m->data.rows()) : 0; }

int r2v_matrix_cols(const r2v_matrix* m) { return m ? static_cast<int>(m->data.cols()) : 0; }

const double* r2v_matrix_data(const r2v_matrix* m) { return m ? m->data.data() : nullptr; }

void r2v_matrix_free(r2v_matrix* m) { delete m; }

int r2v_labels_size(const r2v_labels* labels) { return labels ? labels->data.size() : 0; }

int r2v_labels_k(const r2v_labels* labels) { return labels ? labels->data.k : 0; }

const int* r2v_labels_data(const r2v_labels* labels) {
  return labels ? labels->data.labels.data() : nullptr;
}

void r2v_labels_free(r2v_labels* labels) { delete labels; }

}  // extern "C"
