#include <doctest.h>

#include "oracles.hpp"
#include "region2vec/clustering.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

using namespace region2vec;

namespace {

Matrix random_points(int n, int d, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> noise(0.0, scale);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = noise(gen);
  }
  return m;
}

Matrix path_adjacency(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
  return a;
}

Matrix complete_adjacency(int n) {
  Matrix a = Matrix::Constant(n, n, 1.0);
  for (int i = 0; i < n; ++i) a(i, i) = 0.0;
  return a;
}

double sse(const Matrix& points, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int c = 1; c <= k; ++c) {
    Vector mu = Vector::Zero(points.cols());
    int count = 0;
    for (int i = 0; i < points.rows(); ++i) {
      if (labels[i] == c) {
        mu += points.row(i).transpose();
        ++count;
      }
    }
    mu /= std::max(count, 1);
    for (int i = 0; i < points.rows(); ++i) {
      if (labels[i] == c) total += (points.row(i).transpose() - mu).squaredNorm();
    }
  }
  return total;
}

}  // namespace

TEST_CASE("ward with k equal to n returns singletons and no merges") {
  std::mt19937_64 gen(61);
  const Matrix points = random_points(6, 2, gen);
  const WardResult result = ward_constrained(points, path_adjacency(6), 6);
  CHECK(result.assignment.k == 6);
  CHECK(result.merges.empty());
  std::set<int> distinct(result.assignment.labels.begin(), result.assignment.labels.end());
  CHECK(distinct.size() == 6);
}

TEST_CASE("ward with k equal to one puts everything together") {
  std::mt19937_64 gen(62);
  const Matrix points = random_points(7, 3, gen);
  const WardResult result = ward_constrained(points, path_adjacency(7), 1);
  CHECK(result.assignment.k == 1);
  CHECK(result.merges.size() == 6);
  for (int label : result.assignment.labels) CHECK(label == 1);
  for (const MergeStep& step : result.merges) CHECK_FALSE(step.violation);
}

TEST_CASE("ward on a path constraint matches the greedy replay oracle") {
  std::mt19937_64 gen(63);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 8;
    const Matrix points = random_points(n, 2, gen, 2.0);
    const Matrix adjacency = path_adjacency(n);
    for (int k = 1; k <= 4; ++k) {
      const WardResult result = ward_constrained(points, adjacency, k);
      const oracles::WardTrace expected = oracles::ward_greedy(points, adjacency, k);
      REQUIRE(result.assignment.labels == expected.labels);
      REQUIRE(result.merges.size() == expected.merge_costs.size());
      for (std::size_t s = 0; s < expected.merge_costs.size(); ++s) {
        REQUIRE(std::abs(result.merges[s].cost - expected.merge_costs[s]) <
                1e-9 * std::max(1.0, expected.merge_costs[s]));
      }
    }
  }
}

TEST_CASE("unconstrained ward equals the centroid-recomputation oracle") {
  // complete adjacency removes the contiguity constraint, so the
  // Lance-Williams implementation must reproduce classic Ward exactly
  std::mt19937_64 gen(64);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 6 + static_cast<int>(gen() % 5);
    const Matrix points = random_points(n, 3, gen, 1.5);
    const int k = 2 + static_cast<int>(gen() % 3);
    const WardResult result = ward_constrained(points, complete_adjacency(n), k);
    const oracles::WardTrace expected = oracles::ward_greedy(points, Matrix(), k);
    REQUIRE(result.assignment.labels == expected.labels);
    for (std::size_t s = 0; s < expected.merge_costs.size(); ++s) {
      REQUIRE(std::abs(result.merges[s].cost - expected.merge_costs[s]) <
              1e-9 * std::max(1.0, expected.merge_costs[s]));
    }
  }
}

TEST_CASE("unconstrained merge costs never decrease") {
  std::mt19937_64 gen(65);
  const int n = 12;
  const Matrix points = random_points(n, 2, gen);
  const WardResult result = ward_constrained(points, complete_adjacency(n), 1);
  for (std::size_t s = 1; s < result.merges.size(); ++s) {
    REQUIRE(result.merges[s].cost >= result.merges[s - 1].cost - 1e-12);
  }
}

TEST_CASE("ward communities stay contiguous on connected constraint graphs") {
  std::mt19937_64 gen(66);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 10 + static_cast<int>(gen() % 8);
    // random connected graph: a path backbone plus random chords
    Matrix adjacency = path_adjacency(n);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (coin(gen) < 0.15) adjacency(i, j) = adjacency(j, i) = 1.0;
      }
    }
    const Matrix points = random_points(n, 3, gen);
    const int k = 2 + static_cast<int>(gen() % 4);
    const WardResult result = ward_constrained(points, adjacency, k);
    REQUIRE(result.assignment.k == k);
    for (int c = 1; c <= k; ++c) {
      REQUIRE(oracles::community_connected(adjacency, result.assignment.labels, c));
    }
    for (const MergeStep& step : result.merges) REQUIRE_FALSE(step.violation);
  }
}

TEST_CASE("ward assignments nest as k decreases") {
  std::mt19937_64 gen(67);
  const int n = 14;
  const Matrix points = random_points(n, 2, gen);
  const Matrix adjacency = path_adjacency(n);
  for (int k = 2; k <= 6; ++k) {
    const WardResult coarse = ward_constrained(points, adjacency, k);
    const WardResult fine = ward_constrained(points, adjacency, k + 1);
    // every fine cluster must map into exactly one coarse cluster
    std::vector<int> image(k + 2, 0);
    for (int i = 0; i < n; ++i) {
      const int f = fine.assignment.labels[i];
      const int c = coarse.assignment.labels[i];
      if (image[f] == 0) image[f] = c;
      REQUIRE(image[f] == c);
    }
  }
}

TEST_CASE("ward flags forced merges on disconnected constraint graphs") {
  std::mt19937_64 gen(68);
  const int n = 6;
  Matrix adjacency = Matrix::Zero(n, n);
  // two disjoint triangles
  for (int base : {0, 3}) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        adjacency(base + i, base + j) = adjacency(base + j, base + i) = 1.0;
      }
    }
  }
  const Matrix points = random_points(n, 2, gen);
  const WardResult result = ward_constrained(points, adjacency, 1);
  REQUIRE(result.merges.size() == 5);
  int violations = 0;
  for (const MergeStep& step : result.merges) violations += step.violation ? 1 : 0;
  CHECK(violations == 1);  // exactly the cross-component merge
  CHECK(result.merges.back().violation);

  // stopping at k = 2 never needs the forced merge
  const WardResult split = ward_constrained(points, adjacency, 2);
  for (const MergeStep& step : split.merges) CHECK_FALSE(step.violation);
}

TEST_CASE("ward rejects out-of-range k") {
  std::mt19937_64 gen(69);
  const Matrix points = random_points(4, 2, gen);
  try {
    ward_constrained(points, path_adjacency(4), 0);
    FAIL("expected InvalidK");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidK);
    CHECK(std::string(e.what()).find("clustering.InvalidK") == 0);
  }
  CHECK_THROWS_AS(ward_constrained(points, path_adjacency(4), 5), Error);
}

TEST_CASE("kmeans with one cluster centers on the column means") {
  std::mt19937_64 gen(71);
  const int n = 9;
  const Matrix points = random_points(n, 3, gen);
  const CommunityAssignment assignment = kmeans(points, 1, 5);
  CHECK(assignment.k == 1);
  for (int label : assignment.labels) CHECK(label == 1);
  // with every point in one cluster the implied centroid is the column mean;
  // nothing else to observe externally, so check the objective directly
  CHECK(std::abs(sse(points, assignment.labels, 1) -
                 (points.rowwise() - points.colwise().mean()).squaredNorm()) < 1e-9);
}

TEST_CASE("kmeans with k equal to n isolates every point") {
  std::mt19937_64 gen(72);
  const Matrix points = random_points(6, 2, gen);
  const CommunityAssignment assignment = kmeans(points, 6, 5);
  CHECK(assignment.k == 6);
  std::set<int> distinct(assignment.labels.begin(), assignment.labels.end());
  CHECK(distinct.size() == 6);
  CHECK(sse(points, assignment.labels, 6) < 1e-18);
}

TEST_CASE("kmeans separates distant blobs exactly for every seed") {
  std::mt19937_64 gen(73);
  const int per_blob = 12;
  Matrix points(2 * per_blob, 2);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < per_blob; ++i) {
    points(i, 0) = noise(gen);
    points(i, 1) = noise(gen);
    points(per_blob + i, 0) = 10.0 + noise(gen);
    points(per_blob + i, 1) = 10.0 + noise(gen);
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CommunityAssignment assignment = kmeans(points, 2, seed);
    REQUIRE(assignment.k == 2);
    for (int i = 1; i < per_blob; ++i) {
      REQUIRE(assignment.labels[i] == assignment.labels[0]);
      REQUIRE(assignment.labels[per_blob +
                                i] == assignment.labels[per_blob]);
    }
    REQUIRE(assignment.labels[0] != assignment.labels[per_blob]);
  }
}

TEST_CASE("kmeans is deterministic and lands on an assignment fixpoint") {
  std::mt19937_64 gen(74);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 20 + static_cast<int>(gen() % 20);
    const int k = 2 + static_cast<int>(gen() % 4);
    const Matrix points = random_points(n, 3, gen, 2.0);
    const CommunityAssignment a = kmeans(points, k, 99);
    const CommunityAssignment b = kmeans(points, k, 99);
    REQUIRE(a.labels == b.labels);

    // fixpoint: every point already sits with its nearest cluster centroid,
    // so one more Lloyd reassignment cannot lower the objective
    Matrix centroids = Matrix::Zero(a.k, points.cols());
    std::vector<int> counts(a.k, 0);
    for (int i = 0; i < n; ++i) {
      centroids.row(a.labels[i] - 1) += points.row(i);
      ++counts[a.labels[i] - 1];
    }
    for (int c = 0; c < a.k; ++c) centroids.row(c) /= std::max(counts[c], 1);
    for (int i = 0; i < n; ++i) {
      const double assigned =
          (points.row(i) - centroids.row(a.labels[i] - 1)).squaredNorm();
      for (int c = 0; c < a.k; ++c) {
        REQUIRE(assigned <= (points.row(i) - centroids.row(c)).squaredNorm() + 1e-9);
      }
    }
  }
}

TEST_CASE("kmeans rejects out-of-range k") {
  std::mt19937_64 gen(75);
  const Matrix points = random_points(5, 2, gen);
  CHECK_THROWS_AS(kmeans(points, 0, 1), Error);
  CHECK_THROWS_AS(kmeans(points, 6, 1), Error);
}
