#include <doctest.h>

#include "oracles.hpp"
#include "region2vec/graph.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <set>

using namespace region2vec;

namespace {

std::vector<std::string> ids(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("n" + std::to_string(i));
  return out;
}

Matrix random_adjacency(int n, double p, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(gen) < p) a(i, j) = a(j, i) = 1.0;
    }
  }
  return a;
}

Matrix path3() {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 2) = a(2, 1) = 1.0;
  return a;
}

}  // namespace

TEST_CASE("normalized adjacency of a single node is the identity") {
  const auto g = SpatialGraph::build(ids(1), Matrix::Zero(1, 1));
  const Matrix norm = normalize_adjacency(g);
  CHECK(norm.rows() == 1);
  CHECK(norm(0, 0) == 1.0);  // 1/sqrt(1) * 1 * 1/sqrt(1), exact in IEEE
}

TEST_CASE("normalized adjacency of a single edge is uniformly one half") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = a(1, 0) = 1.0;
  const Matrix norm = normalize_adjacency(SpatialGraph::build(ids(2), a));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(norm(i, j) - 0.5) < 1e-15);
    }
  }
}

TEST_CASE("normalized adjacency on a three-node path matches the closed form") {
  const Matrix norm = normalize_adjacency(SpatialGraph::build(ids(3), path3()));
  // middle node has degree 3 after the self-loop, ends have degree 2
  CHECK(std::abs(norm(0, 1) - 1.0 / std::sqrt(6.0)) < 1e-12);
  CHECK(std::abs(norm(0, 1) - 0.408248) < 1e-6);
  CHECK(std::abs(norm(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(norm(1, 1) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(norm(0, 2)) < 1e-15);
}

TEST_CASE("normalized adjacency agrees with an entrywise reference on random graphs") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 19);
    const Matrix a = random_adjacency(n, 0.3, gen);
    const Matrix norm = normalize_adjacency(SpatialGraph::build(ids(n), a));
    const Matrix expected = oracles::normalized_adjacency(a);
    REQUIRE((norm - expected).cwiseAbs().maxCoeff() < 1e-12);
    // symmetry and the 1/deg diagonal fall out of the definition; check anyway
    REQUIRE((norm - norm.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i) {
      const double deg = a.row(i).sum() + 1.0;
      REQUIRE(std::abs(norm(i, i) - 1.0 / deg) < 1e-12);
    }
  }
}

TEST_CASE("normalized adjacency has spectral radius at most one") {
  // The symmetric normalization bounds the spectrum by [-1, 1]; note row sums
  // can exceed one (a star graph's hub row does), so the matrix is not
  // sub-stochastic and the eigenvalue bound is the meaningful contraction
  // property.
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 29);
    const Matrix a = random_adjacency(n, 0.25, gen);
    const Matrix norm = normalize_adjacency(SpatialGraph::build(ids(n), a));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(norm);
    REQUIRE(eig.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }

  // the star-graph hub row sum actually exceeds one
  Matrix star = Matrix::Zero(5, 5);
  for (int leaf = 1; leaf < 5; ++leaf) star(0, leaf) = star(leaf, 0) = 1.0;
  const Matrix norm = normalize_adjacency(SpatialGraph::build(ids(5), star));
  CHECK(norm.row(0).sum() > 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(norm);
  CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("hop counts on small fixed graphs") {
  SUBCASE("three-node path") {
    const auto g = SpatialGraph::build(ids(3), path3());
    CHECK(g.hop(0, 2) == 2);
    CHECK(g.hop(0, 1) == 1);
    CHECK(g.hop(1, 1) == 0);
  }
  SUBCASE("two isolated nodes use the sentinel n") {
    const auto g = SpatialGraph::build(ids(2), Matrix::Zero(2, 2));
    CHECK(g.hop(0, 1) == 2);
  }
  SUBCASE("four-cycle opposite corners") {
    Matrix a = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
      const int j = (i + 1) % 4;
      a(i, j) = a(j, i) = 1.0;
    }
    const auto g = SpatialGraph::build(ids(4), a);
    CHECK(g.hop(0, 2) == 2);
    CHECK(g.hop(1, 3) == 2);
    CHECK(g.hop(0, 1) == 1);
  }
}

TEST_CASE("hop counts match a Floyd-Warshall reference on random graphs") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 49);
    // low densities keep some pairs disconnected so the sentinel is exercised
    const double p = (trial % 2 == 0) ? 0.05 : 0.3;
    const Matrix a = random_adjacency(n, p, gen);
    const IntMatrix hops = all_pairs_hops(a);
    const IntMatrix expected = oracles::hops_floyd_warshall(a);
    REQUIRE(hops == expected);
    for (int i = 0; i < n; ++i) {
      REQUIRE(hops(i, i) == 0);
      for (int j = 0; j < n; ++j) {
        REQUIRE(hops(i, j) == hops(j, i));
        REQUIRE((hops(i, j) == 1) == (a(i, j) == 1.0));
      }
    }
  }
}

TEST_CASE("pair extraction on worked examples") {
  SUBCASE("single positive pair") {
    FlowMatrix flows;
    flows.s = Matrix::Zero(2, 2);
    flows.s(0, 1) = flows.s(1, 0) = 5.0;
    const PairSet pairs = extract_pairs(flows);
    REQUIRE(pairs.n_pos() == 1);
    CHECK(pairs.positive[0].i == 0);
    CHECK(pairs.positive[0].j == 1);
    CHECK(pairs.positive[0].flow == 5.0);
    CHECK(pairs.n_neg() == 0);
  }
  SUBCASE("all-zero flows yield only negatives") {
    FlowMatrix flows;
    flows.s = Matrix::Zero(3, 3);
    const PairSet pairs = extract_pairs(flows);
    CHECK(pairs.n_pos() == 0);
    CHECK(pairs.n_neg() == 3);
  }
  SUBCASE("mixed flows split by sign of the entry") {
    FlowMatrix flows;
    flows.s = Matrix::Zero(3, 3);
    flows.s(0, 1) = flows.s(1, 0) = 2.0;
    flows.s(1, 2) = flows.s(2, 1) = 7.0;
    const PairSet pairs = extract_pairs(flows);
    REQUIRE(pairs.n_pos() == 2);
    CHECK(pairs.positive[0].i == 0);
    CHECK(pairs.positive[0].j == 1);
    CHECK(pairs.positive[0].flow == 2.0);
    CHECK(pairs.positive[1].i == 1);
    CHECK(pairs.positive[1].j == 2);
    CHECK(pairs.positive[1].flow == 7.0);
    REQUIRE(pairs.n_neg() == 1);
    CHECK(pairs.negative[0] == std::make_pair(0, 2));
  }
}

TEST_CASE("pair extraction partitions every unordered pair exactly once") {
  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 14);
    FlowMatrix flows;
    flows.s = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (coin(gen) < 0.5) flows.s(i, j) = flows.s(j, i) = 1.0 + 10.0 * coin(gen);
      }
    }
    const PairSet pairs = extract_pairs(flows);
    REQUIRE(pairs.n_pos() + pairs.n_neg() == n * (n - 1) / 2);
    std::set<std::pair<int, int>> seen;
    for (const auto& p : pairs.positive) {
      REQUIRE(p.i < p.j);
      REQUIRE(flows.s(p.i, p.j) == p.flow);
      REQUIRE(p.flow > 0.0);
      REQUIRE(seen.insert({p.i, p.j}).second);
    }
    for (const auto& [i, j] : pairs.negative) {
      REQUIRE(i < j);
      REQUIRE(flows.s(i, j) == 0.0);
      REQUIRE(seen.insert({i, j}).second);
    }
  }
}

TEST_CASE("pair extraction rejects graphs with fewer than two nodes") {
  FlowMatrix flows;
  flows.s = Matrix::Zero(1, 1);
  CHECK_THROWS_WITH_AS(extract_pairs(flows),
                       "graph-core.EmptyGraph: pair extraction needs at least two nodes",
                       Error);
}

TEST_CASE("graph construction validates its adjacency") {
  SUBCASE("nonzero diagonal") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    CHECK_THROWS_AS(SpatialGraph::build(ids(2), a), Error);
  }
  SUBCASE("asymmetric") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    CHECK_THROWS_AS(SpatialGraph::build(ids(2), a), Error);
  }
  SUBCASE("non-binary entries") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = a(1, 0) = 0.5;
    CHECK_THROWS_AS(SpatialGraph::build(ids(2), a), Error);
  }
  SUBCASE("id count mismatch") {
    CHECK_THROWS_AS(SpatialGraph::build(ids(3), Matrix::Zero(2, 2)), Error);
  }
}
