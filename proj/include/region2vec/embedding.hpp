#pragma once

#include "region2vec/dataset.hpp"
#include "region2vec/graph.hpp"
#include "region2vec/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace region2vec {

struct TrainingConfig {
  int hidden_width = 64;
  int output_width = 16;
  int layers = 2;
  int hop_threshold = 2;   // epsilon: pairs farther than this get pushed apart
  int iterations = 400;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 42;
  double distance_floor = 1e-9;
  // 0 disables sampling; otherwise caps positive/negative/hop pair lists per
  // iteration by uniform subsampling. Intended for n > 2000 only.
  int pair_sample = 0;

  void validate() const;
};

// Layer weights of the graph-convolutional encoder. Widths run
// m -> hidden -> ... -> output with ReLU on all but the last layer.
struct GcnParameters {
  std::vector<Matrix> weights;

  const Matrix& w0() const { return weights.front(); }
  const Matrix& w1() const { return weights.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  /// Glorot-uniform initialization from the seeded RNG.
  static GcnParameters init(int input_width, const TrainingConfig& config);
};

struct EmbeddingMatrix {
  Matrix z;  // n x output_width

  int n() const { return static_cast<int>(z.rows()); }
  int dim() const { return static_cast<int>(z.cols()); }
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  long t = 0;

  static AdamState zeros_like(const GcnParameters& params);
};

struct LossBreakdown {
  double total = 0.0;
  double numerator = 0.0;      // flow-weighted positive-pair distances, averaged
  double negative_term = 0.0;  // negative-pair distances, averaged
  double hop_term = 0.0;       // unnormalized sum over pairs beyond the hop threshold
};

struct TraceRow {
  int iteration;
  LossBreakdown loss;
};

/// Forward pass keeping per-layer activations for the backward pass.
struct ForwardPass {
  std::vector<Matrix> propagated;      // per layer: norm_adj * input
  std::vector<Matrix> preactivation;   // per layer: propagated * W
  Matrix output;                       // final embeddings
};

ForwardPass gcn_forward_pass(const Matrix& norm_adj, const Matrix& attributes,
                             const GcnParameters& params);

/// Embedding output of the convolutional encoder (Z of the final layer).
EmbeddingMatrix gcn_forward(const Matrix& norm_adj, const AttributeMatrix& attributes,
                            const GcnParameters& params);

LossBreakdown compute_loss(const EmbeddingMatrix& z, const PairSet& pairs,
                           const IntMatrix& hops, const TrainingConfig& config);

/// Analytic gradients of the loss w.r.t. every layer's weights.
std::vector<Matrix> compute_gradients(const Matrix& norm_adj, const Matrix& attributes,
                                      const GcnParameters& params, const PairSet& pairs,
                                      const IntMatrix& hops, const TrainingConfig& config,
                                      LossBreakdown* loss_out = nullptr);

void adam_step(GcnParameters& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainingConfig& config);

/// Full training loop: forward, loss, analytic gradients, Adam, repeated
/// config.iterations times. Appends one trace row per iteration plus a final
/// row for the returned embeddings. Deterministic for a fixed seed.
EmbeddingMatrix train(const SpatialGraph& graph, const FlowMatrix& flows,
                      const AttributeMatrix& attributes, const TrainingConfig& config,
                      std::vector<TraceRow>* trace = nullptr);

}  // namespace region2vec
