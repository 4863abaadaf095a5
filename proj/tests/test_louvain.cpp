#include <doctest.h>

#include "oracles.hpp"
#include "region2vec/louvain.hpp"
#include "region2vec/rng.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace region2vec;

namespace {

FlowMatrix from_dense(Matrix s) { return FlowMatrix{std::move(s)}; }

/// Two unit-weight 4-cliques joined by a single unit edge between nodes 0 and 4.
FlowMatrix two_cliques() {
  Matrix s = Matrix::Zero(8, 8);
  for (int base : {0, 4}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        s(base + i, base + j) = s(base + j, base + i) = 1.0;
      }
    }
  }
  s(0, 4) = s(4, 0) = 1.0;
  return from_dense(std::move(s));
}

FlowMatrix random_flow_graph(int n, std::mt19937_64& gen, double density = 0.5) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix s = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(gen) < density) s(i, j) = s(j, i) = 1.0 + 9.0 * coin(gen);
    }
  }
  return from_dense(std::move(s));
}

CommunityAssignment assignment_of(std::vector<int> labels) {
  return CommunityAssignment::from_labels(std::move(labels));
}

/// Highest modularity over every partition of the nodes, measured through the
/// library's own modularity function so the comparison is exact.
double exhaustive_best_q(const FlowMatrix& flows, std::vector<int>* best_labels = nullptr,
                         long* partition_count = nullptr) {
  double best = -2.0;
  long count = 0;
  oracles::enumerate_partitions(flows.n(), [&](const std::vector<int>& zero_based) {
    ++count;
    std::vector<int> labels(zero_based.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = zero_based[i] + 1;
    const double q = modularity(flows, assignment_of(labels));
    if (q > best) {
      best = q;
      if (best_labels) *best_labels = labels;
    }
  });
  if (partition_count) *partition_count = count;
  return best;
}

}  // namespace

TEST_CASE("modularity of the all-in-one partition is zero") {
  std::mt19937_64 gen(81);
  const FlowMatrix flows = random_flow_graph(6, gen);
  const double q = modularity(flows, assignment_of(std::vector<int>(6, 1)));
  CHECK(std::abs(q) < 1e-12);
}

TEST_CASE("modularity of component-split disconnected cliques is one half") {
  Matrix s = Matrix::Zero(6, 6);
  for (int base : {0, 3}) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        s(base + i, base + j) = s(base + j, base + i) = 2.0;
      }
    }
  }
  const double q = modularity(from_dense(std::move(s)),
                              assignment_of({1, 1, 1, 2, 2, 2}));
  CHECK(std::abs(q - 0.5) < 1e-12);
}

TEST_CASE("modularity matches the independent oracle on random instances") {
  std::mt19937_64 gen(82);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + static_cast<int>(gen() % 10);
    const FlowMatrix flows = random_flow_graph(n, gen, 0.6);
    if (flows.s.sum() == 0.0) continue;
    std::vector<int> labels(n);
    const int k = 1 + static_cast<int>(gen() % 3);
    for (int i = 0; i < n; ++i) labels[i] = 1 + static_cast<int>(gen() % k);
    const CommunityAssignment assignment = assignment_of(labels);
    const double q = modularity(flows, assignment);
    const double expected = oracles::modularity(flows.s, assignment.labels);
    REQUIRE(std::abs(q - expected) < 1e-12);
  }
}

TEST_CASE("modularity rejects empty flow matrices") {
  try {
    modularity(from_dense(Matrix::Zero(3, 3)), assignment_of({1, 1, 2}));
    FAIL("expected EmptyFlows");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyFlows);
    CHECK(std::string(e.what()).find("baselines.EmptyFlows") == 0);
  }
  CHECK_THROWS_AS(louvain(from_dense(Matrix::Zero(3, 3)), 1), Error);
}

TEST_CASE("louvain recovers the two cliques and the global optimum") {
  const FlowMatrix flows = two_cliques();
  std::vector<int> best_labels;
  long partitions = 0;
  const double best_q = exhaustive_best_q(flows, &best_labels, &partitions);
  REQUIRE(partitions == 4140);  // Bell(8): every partition really was visited
  CHECK(std::abs(best_q - 11.0 / 26.0) < 1e-12);

  const LouvainResult result = louvain(flows, 7);
  // evaluating louvain's partition through the same function used for the
  // enumeration makes the optimality comparison exact, no tolerance needed
  CHECK(modularity(flows, result.assignment) == best_q);
  CHECK(std::abs(result.modularity - best_q) < 1e-12);
  CHECK(result.assignment.k == 2);
  for (int i = 1; i < 4; ++i) {
    CHECK(result.assignment.labels[i] == result.assignment.labels[0]);
    CHECK(result.assignment.labels[4 + i] == result.assignment.labels[4]);
  }
  CHECK(result.assignment.labels[0] != result.assignment.labels[4]);
}

TEST_CASE("louvain leaves a uniform complete graph in one community") {
  Matrix s = Matrix::Constant(5, 5, 3.0);
  for (int i = 0; i < 5; ++i) s(i, i) = 0.0;
  const FlowMatrix flows = from_dense(std::move(s));
  const LouvainResult result = louvain(flows, 3);
  CHECK(result.assignment.k == 1);
  CHECK(std::abs(result.modularity) < 1e-12);
  CHECK(std::abs(exhaustive_best_q(flows)) < 1e-12);
}

TEST_CASE("louvain is deterministic in the seed") {
  std::mt19937_64 gen(83);
  const FlowMatrix flows = random_flow_graph(12, gen, 0.4);
  const LouvainResult a = louvain(flows, 5);
  const LouvainResult b = louvain(flows, 5);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.modularity == b.modularity);
}

TEST_CASE("louvain's reported q is the recomputed modularity of its partition") {
  std::mt19937_64 gen(84);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 5 + static_cast<int>(gen() % 12);
    const FlowMatrix flows = random_flow_graph(n, gen, 0.45);
    if (flows.s.sum() == 0.0) continue;
    const LouvainResult result = louvain(flows, 1000 + trial);
    REQUIRE(std::abs(result.modularity - modularity(flows, result.assignment)) < 1e-12);
    REQUIRE(std::abs(result.modularity -
                     oracles::modularity(flows.s, result.assignment.labels)) < 1e-12);
    REQUIRE(result.levels >= 1);
  }
}

TEST_CASE("local moving passes never decrease modularity") {
  std::mt19937_64 gen(85);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 8 + static_cast<int>(gen() % 8);
    const FlowMatrix flows = random_flow_graph(n, gen, 0.5);
    if (flows.s.sum() == 0.0) continue;
    const detail::WeightedGraph g = detail::WeightedGraph::from_flows(flows);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i;
    Rng rng(trial + 1);
    for (int pass = 0; pass < 5; ++pass) {
      const double before = detail::graph_modularity(g, labels);
      const int moves = detail::local_move(g, labels, rng);
      const double after = detail::graph_modularity(g, labels);
      REQUIRE(after >= before - 1e-12);
      if (moves == 0) break;
    }
  }
}

TEST_CASE("louvain sits near the exhaustive optimum on small graphs") {
  std::mt19937_64 gen(86);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(gen() % 4);  // up to 8 nodes
    const FlowMatrix flows = random_flow_graph(n, gen, 0.55);
    if (flows.s.sum() == 0.0) continue;
    const double best_q = exhaustive_best_q(flows);
    const LouvainResult result = louvain(flows, trial);
    REQUIRE(result.modularity <= best_q + 1e-12);
    REQUIRE(result.modularity >= best_q - 0.02);
  }
}
