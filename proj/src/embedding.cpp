#include "region2vec/embedding.hpp"

#include "region2vec/rng.hpp"

#include <cmath>
#include <utility>

namespace region2vec {

namespace {

// The denominator guard is checked against unfloored distances: a denominator
// that is genuinely (numerically) zero must surface as NoDenominator even
// though the floored terms report the floor value.
constexpr double kDenominatorGuard = 1e-12;

struct WeightedPair {
  int i;
  int j;
  double weight;  // log(s_p) for positive pairs, 1/log(hop) for hop pairs
};

// Pair lists with precomputed loss weights; hop pairs scan every unordered
// pair, so positive/negative pairs far apart in space appear in two roles.
struct PairContext {
  std::vector<WeightedPair> positive;
  std::vector<std::pair<int, int>> negative;
  std::vector<WeightedPair> hop;
};

PairContext build_context(const PairSet& pairs, const IntMatrix& hops,
                          const TrainingConfig& config) {
  PairContext ctx;
  ctx.positive.reserve(pairs.positive.size());
  for (const auto& p : pairs.positive) {
    ctx.positive.push_back({p.i, p.j, std::log(p.flow)});
  }
  ctx.negative = pairs.negative;
  const int n = static_cast<int>(hops.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (hops(i, j) > config.hop_threshold) {
        ctx.hop.push_back({i, j, 1.0 / std::log(static_cast<double>(hops(i, j)))});
      }
    }
  }
  return ctx;
}

double row_distance(const Matrix& z, int i, int j) {
  return (z.row(i) - z.row(j)).norm();
}

LossBreakdown context_loss(const Matrix& z, const PairContext& ctx,
                           const TrainingConfig& config) {
  if (ctx.positive.empty()) {
    throw Error(ErrorCode::NoPositivePairs, "no positive flow pairs to attract");
  }
  const double floor = config.distance_floor;
  LossBreakdown loss;
  for (const auto& p : ctx.positive) {
    loss.numerator += p.weight * std::max(row_distance(z, p.i, p.j), floor);
  }
  loss.numerator /= static_cast<double>(ctx.positive.size());

  double raw_denominator = 0.0;
  for (const auto& [i, j] : ctx.negative) {
    const double d = row_distance(z, i, j);
    loss.negative_term += std::max(d, floor);
    raw_denominator += d;
  }
  if (!ctx.negative.empty()) {
    loss.negative_term /= static_cast<double>(ctx.negative.size());
    raw_denominator /= static_cast<double>(ctx.negative.size());
  }
  for (const auto& h : ctx.hop) {
    const double d = row_distance(z, h.i, h.j);
    loss.hop_term += h.weight * std::max(d, floor);
    raw_denominator += h.weight * d;
  }
  if (raw_denominator < kDenominatorGuard) {
    throw Error(ErrorCode::NoDenominator, "repulsion denominator is numerically zero");
  }
  loss.total = loss.numerator / (loss.negative_term + loss.hop_term);
  return loss;
}

// dLoss/dZ for the ratio loss. With L = N/D, a pair's distance d contributes
// dL/dd = [positive] w/(N_pos D) - (N/D^2)([negative]/N_neg + [hop] w), and
// dd/dz_i = (z_i - z_j)/d. Pairs at or below the distance floor are constants.
Matrix loss_gradient_wrt_z(const Matrix& z, const PairContext& ctx,
                           const TrainingConfig& config, const LossBreakdown& loss) {
  Matrix grad = Matrix::Zero(z.rows(), z.cols());
  const double floor = config.distance_floor;
  const double denominator = loss.negative_term + loss.hop_term;
  const double ratio_pull = loss.numerator / (denominator * denominator);

  auto accumulate = [&](int i, int j, double dloss_dd) {
    const double d = row_distance(z, i, j);
    if (d <= floor) return;
    const Eigen::RowVectorXd direction = (z.row(i) - z.row(j)) / d;
    grad.row(i) += dloss_dd * direction;
    grad.row(j) -= dloss_dd * direction;
  };

  const double pos_scale = 1.0 / (static_cast<double>(ctx.positive.size()) * denominator);
  for (const auto& p : ctx.positive) accumulate(p.i, p.j, p.weight * pos_scale);
  if (!ctx.negative.empty()) {
    const double neg_scale = -ratio_pull / static_cast<double>(ctx.negative.size());
    for (const auto& [i, j] : ctx.negative) accumulate(i, j, neg_scale);
  }
  for (const auto& h : ctx.hop) accumulate(h.i, h.j, -ratio_pull * h.weight);
  return grad;
}

std::vector<Matrix> backward(const Matrix& norm_adj, const GcnParameters& params,
                             const ForwardPass& forward, const Matrix& grad_output) {
  const int layers = params.layer_count();
  std::vector<Matrix> grads(layers);
  Matrix grad_pre = grad_output;  // gradient w.r.t. the current layer's preactivation
  for (int l = layers - 1; l >= 0; --l) {
    if (l < layers - 1) {
      // ReLU mask; the subgradient at exactly 0 is taken as 0.
      grad_pre = grad_pre.cwiseProduct(
          (forward.preactivation[l].array() > 0.0).cast<double>().matrix());
    }
    grads[l] = forward.propagated[l].transpose() * grad_pre;
    if (l > 0) {
      grad_pre = norm_adj.transpose() * (grad_pre * params.weights[l].transpose());
    }
  }
  return grads;
}

PairContext sample_context(const PairContext& full, int cap, Rng& rng) {
  auto take = [&](auto& list) {
    const int n = static_cast<int>(list.size());
    if (n <= cap) return;
    // Partial Fisher-Yates: the first `cap` slots end up a uniform subset.
    for (int i = 0; i < cap; ++i) {
      std::swap(list[i], list[i + static_cast<int>(rng.uniform_int(n - i))]);
    }
    list.resize(cap);
  };
  PairContext sampled = full;
  take(sampled.positive);
  take(sampled.negative);
  take(sampled.hop);
  return sampled;
}

}  // namespace

void TrainingConfig::validate() const {
  if (hidden_width < 1 || output_width < 1 || layers < 1) {
    throw Error(ErrorCode::InvalidConfig, "layer widths and count must be positive");
  }
  if (hop_threshold < 1) {
    throw Error(ErrorCode::InvalidConfig, "hop_threshold must be >= 1");
  }
  if (iterations < 1) {
    throw Error(ErrorCode::InvalidConfig, "iterations must be positive");
  }
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  }
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "Adam betas must lie in (0,1)");
  }
  if (!(adam_epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "adam_epsilon must be positive");
  }
  if (!(distance_floor > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "distance_floor must be positive");
  }
  if (pair_sample < 0) {
    throw Error(ErrorCode::InvalidConfig, "pair_sample must be >= 0");
  }
}

GcnParameters GcnParameters::init(int input_width, const TrainingConfig& config) {
  config.validate();
  if (input_width < 1) {
    throw Error(ErrorCode::InvalidArgument, "attribute matrix must have at least one column");
  }
  std::vector<int> widths;
  widths.push_back(input_width);
  for (int l = 0; l < config.layers - 1; ++l) widths.push_back(config.hidden_width);
  widths.push_back(config.output_width);

  Rng rng(config.seed);
  GcnParameters params;
  for (int l = 0; l < config.layers; ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    params.weights.push_back(std::move(w));
  }
  return params;
}

AdamState AdamState::zeros_like(const GcnParameters& params) {
  AdamState state;
  for (const auto& w : params.weights) {
    state.m.push_back(Matrix::Zero(w.rows(), w.cols()));
    state.v.push_back(Matrix::Zero(w.rows(), w.cols()));
  }
  return state;
}

ForwardPass gcn_forward_pass(const Matrix& norm_adj, const Matrix& attributes,
                             const GcnParameters& params) {
  if (norm_adj.rows() != norm_adj.cols() || norm_adj.rows() != attributes.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "adjacency and attribute row counts disagree");
  }
  const int layers = params.layer_count();
  ForwardPass pass;
  pass.propagated.reserve(layers);
  pass.preactivation.reserve(layers);
  Matrix h = attributes;
  for (int l = 0; l < layers; ++l) {
    if (h.cols() != params.weights[l].rows()) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) +
                                                " weight shape does not match its input");
    }
    pass.propagated.push_back(norm_adj * h);
    pass.preactivation.push_back(pass.propagated.back() * params.weights[l]);
    h = (l < layers - 1) ? pass.preactivation.back().cwiseMax(0.0)
                         : pass.preactivation.back();
  }
  pass.output = std::move(h);
  return pass;
}

EmbeddingMatrix gcn_forward(const Matrix& norm_adj, const AttributeMatrix& attributes,
                            const GcnParameters& params) {
  return EmbeddingMatrix{gcn_forward_pass(norm_adj, attributes.x, params).output};
}

LossBreakdown compute_loss(const EmbeddingMatrix& z, const PairSet& pairs,
                           const IntMatrix& hops, const TrainingConfig& config) {
  if (z.n() != static_cast<int>(hops.rows())) {
    throw Error(ErrorCode::ShapeMismatch, "embedding rows do not match hop matrix");
  }
  return context_loss(z.z, build_context(pairs, hops, config), config);
}

std::vector<Matrix> compute_gradients(const Matrix& norm_adj, const Matrix& attributes,
                                      const GcnParameters& params, const PairSet& pairs,
                                      const IntMatrix& hops, const TrainingConfig& config,
                                      LossBreakdown* loss_out) {
  const ForwardPass forward = gcn_forward_pass(norm_adj, attributes, params);
  const PairContext ctx = build_context(pairs, hops, config);
  const LossBreakdown loss = context_loss(forward.output, ctx, config);
  if (loss_out) *loss_out = loss;
  return backward(norm_adj, params, forward,
                  loss_gradient_wrt_z(forward.output, ctx, config, loss));
}

void adam_step(GcnParameters& params, const std::vector<Matrix>& grads, AdamState& state,
               const TrainingConfig& config) {
  if (grads.size() != params.weights.size()) {
    throw Error(ErrorCode::ShapeMismatch, "gradient count does not match parameter count");
  }
  state.t += 1;
  const double correction1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.t));
  const double correction2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.t));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    state.m[l] = config.adam_beta1 * state.m[l] + (1.0 - config.adam_beta1) * grads[l];
    state.v[l] = config.adam_beta2 * state.v[l] +
                 (1.0 - config.adam_beta2) * grads[l].cwiseProduct(grads[l]);
    const Matrix m_hat = state.m[l] / correction1;
    const Matrix v_hat = state.v[l] / correction2;
    params.weights[l].array() -= config.learning_rate * m_hat.array() /
                                 (v_hat.array().sqrt() + config.adam_epsilon);
  }
}

EmbeddingMatrix train(const SpatialGraph& graph, const FlowMatrix& flows,
                      const AttributeMatrix& attributes, const TrainingConfig& config,
                      std::vector<TraceRow>* trace) {
  config.validate();
  if (flows.n() != graph.n || attributes.rows() != graph.n) {
    throw Error(ErrorCode::ShapeMismatch, "graph, flows, and attributes disagree on size");
  }
  const Matrix norm_adj = normalize_adjacency(graph);
  const PairSet pairs = extract_pairs(flows);
  const PairContext full_ctx = build_context(pairs, graph.hop, config);
  if (full_ctx.positive.empty()) {
    throw Error(ErrorCode::NoPositivePairs, "no positive flow pairs to attract");
  }

  GcnParameters params = GcnParameters::init(static_cast<int>(attributes.cols()), config);
  AdamState state = AdamState::zeros_like(params);
  // Separate stream for the optional pair subsampling so enabling it does not
  // disturb the weight initialization.
  Rng sample_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  for (int it = 0; it < config.iterations; ++it) {
    const PairContext ctx = config.pair_sample > 0
                                ? sample_context(full_ctx, config.pair_sample, sample_rng)
                                : full_ctx;
    const ForwardPass forward = gcn_forward_pass(norm_adj, attributes.x, params);
    const LossBreakdown loss = context_loss(forward.output, ctx, config);
    if (trace) trace->push_back({it, loss});
    if (!std::isfinite(loss.total)) {
      throw Error(ErrorCode::NonFiniteLoss,
                  "loss diverged at iteration " + std::to_string(it));
    }
    const std::vector<Matrix> grads =
        backward(norm_adj, params, forward,
                 loss_gradient_wrt_z(forward.output, ctx, config, loss));
    adam_step(params, grads, state, config);
  }

  const ForwardPass final_pass = gcn_forward_pass(norm_adj, attributes.x, params);
  const LossBreakdown final_loss = context_loss(final_pass.output, full_ctx, config);
  if (trace) trace->push_back({config.iterations, final_loss});
  if (!std::isfinite(final_loss.total)) {
    throw Error(ErrorCode::NonFiniteLoss, "final loss is not finite");
  }
  return EmbeddingMatrix{final_pass.output};
}

}  // namespace region2vec
