#include "region2vec/louvain.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace region2vec {

namespace detail {

WeightedGraph WeightedGraph::from_flows(const FlowMatrix& flows) {
  const int n = flows.n();
  WeightedGraph g;
  g.adj.resize(n);
  g.self_weight.assign(n, 0.0);
  g.degree.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = flows.s(i, j);
      if (w > 0.0) {
        g.adj[i].emplace_back(j, w);
        g.degree[i] += w;
      }
    }
    g.total_degree += g.degree[i];
  }
  return g;
}

double graph_modularity(const WeightedGraph& g, const std::vector<int>& labels) {
  const int n = g.n();
  std::vector<double> internal(n, 0.0);  // ordered internal weight per community
  std::vector<double> total(n, 0.0);     // summed degrees per community
  for (int i = 0; i < n; ++i) {
    const int c = labels[i];
    total[c] += g.degree[i];
    internal[c] += 2.0 * g.self_weight[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (labels[j] == c) internal[c] += w;
    }
  }
  double q = 0.0;
  for (int c = 0; c < n; ++c) {
    if (total[c] <= 0.0 && internal[c] <= 0.0) continue;
    const double share = total[c] / g.total_degree;
    q += internal[c] / g.total_degree - share * share;
  }
  return q;
}

int local_move(const WeightedGraph& g, std::vector<int>& labels, Rng& rng) {
  const int n = g.n();
  std::vector<double> sigma_tot(n, 0.0);
  for (int i = 0; i < n; ++i) sigma_tot[labels[i]] += g.degree[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> weight_to(n, 0.0);
  std::vector<int> touched;
  int total_moves = 0;
  for (;;) {
    rng.shuffle(order);
    int moves = 0;
    for (const int i : order) {
      const int from = labels[i];
      sigma_tot[from] -= g.degree[i];
      touched.clear();
      for (const auto& [j, w] : g.adj[i]) {
        const int c = labels[j];
        if (weight_to[c] == 0.0) touched.push_back(c);
        weight_to[c] += w;
      }
      // Gain of joining c, up to the common 1/(2m) factor; staying put is the
      // baseline, so ties never move a node.
      int best = from;
      double best_gain = weight_to[from] - sigma_tot[from] * g.degree[i] / g.total_degree;
      for (const int c : touched) {
        if (c == from) continue;
        const double gain = weight_to[c] - sigma_tot[c] * g.degree[i] / g.total_degree;
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      for (const int c : touched) weight_to[c] = 0.0;
      sigma_tot[best] += g.degree[i];
      if (best != from) {
        labels[i] = best;
        ++moves;
      }
    }
    total_moves += moves;
    if (moves == 0) break;
  }
  return total_moves;
}

namespace {

// Collapse each community into one node, keeping internal weight as self loops
// so degrees are preserved.
WeightedGraph aggregate(const WeightedGraph& g, const std::vector<int>& dense_labels,
                        int community_count) {
  WeightedGraph out;
  out.adj.resize(community_count);
  out.self_weight.assign(community_count, 0.0);
  out.degree.assign(community_count, 0.0);
  std::map<std::pair<int, int>, double> cross;
  for (int i = 0; i < g.n(); ++i) {
    const int a = dense_labels[i];
    out.self_weight[a] += g.self_weight[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (j < i) continue;  // each unordered edge appears twice in adj
      const int b = dense_labels[j];
      if (a == b) {
        out.self_weight[a] += w;
      } else {
        cross[{std::min(a, b), std::max(a, b)}] += w;
      }
    }
  }
  for (const auto& [edge, w] : cross) {
    out.adj[edge.first].emplace_back(edge.second, w);
    out.adj[edge.second].emplace_back(edge.first, w);
  }
  for (int c = 0; c < community_count; ++c) {
    std::sort(out.adj[c].begin(), out.adj[c].end());
    for (const auto& [j, w] : out.adj[c]) out.degree[c] += w;
    out.degree[c] += 2.0 * out.self_weight[c];
    out.total_degree += out.degree[c];
  }
  return out;
}

}  // namespace

}  // namespace detail

double modularity(const FlowMatrix& flows, const CommunityAssignment& assignment) {
  const int n = flows.n();
  if (assignment.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "assignment length does not match flow matrix");
  }
  const detail::WeightedGraph g = detail::WeightedGraph::from_flows(flows);
  if (g.total_degree <= 0.0) {
    throw Error(ErrorCode::EmptyFlows, "total flow weight is zero");
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = assignment.labels[i] - 1;
  return detail::graph_modularity(g, labels);
}

LouvainResult louvain(const FlowMatrix& flows, std::uint64_t seed) {
  detail::WeightedGraph g = detail::WeightedGraph::from_flows(flows);
  if (g.total_degree <= 0.0) {
    throw Error(ErrorCode::EmptyFlows, "total flow weight is zero");
  }
  const int n = flows.n();
  Rng rng(seed);
  std::vector<int> node_of(n);  // original node -> node of the current level graph
  std::iota(node_of.begin(), node_of.end(), 0);

  LouvainResult result;
  for (;;) {
    std::vector<int> labels(g.n());
    std::iota(labels.begin(), labels.end(), 0);
    if (detail::local_move(g, labels, rng) == 0) break;
    // Renumber communities densely in node order before collapsing.
    std::vector<int> dense(g.n(), -1);
    int communities = 0;
    for (int i = 0; i < g.n(); ++i) {
      if (dense[labels[i]] < 0) dense[labels[i]] = communities++;
    }
    std::vector<int> dense_labels(g.n());
    for (int i = 0; i < g.n(); ++i) dense_labels[i] = dense[labels[i]];
    for (int v = 0; v < n; ++v) node_of[v] = dense_labels[node_of[v]];
    g = detail::aggregate(g, dense_labels, communities);
    result.levels += 1;
  }

  for (int& label : node_of) ++label;
  result.assignment = CommunityAssignment::from_labels(std::move(node_of));
  result.modularity = modularity(flows, result.assignment);
  return result;
}

}  // namespace region2vec
