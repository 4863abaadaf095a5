#include "region2vec/clustering.hpp"

#include "region2vec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

namespace region2vec {

namespace {

// Heap entry for a candidate merge. Version stamps invalidate entries lazily:
// an entry is live only while neither endpoint has been merged since the push.
struct Candidate {
  double cost;
  int left;
  int right;
  long version_left;
  long version_right;
};

struct CandidateAfter {
  bool operator()(const Candidate& a, const Candidate& b) const {
    return std::tie(a.cost, a.left, a.right) > std::tie(b.cost, b.left, b.right);
  }
};

double squared_distance(const Matrix& points, int i, int j) {
  return (points.row(i) - points.row(j)).squaredNorm();
}

}  // namespace

WardResult ward_constrained(const Matrix& points, const Matrix& adjacency, int k) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "no points to cluster");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidK, "k must be in [1, " + std::to_string(n) + "]");
  }
  if (adjacency.rows() != n || adjacency.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "constraint matrix does not match point count");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "constraint matrix must be binary");
      }
      if (a != adjacency(j, i)) {
        throw Error(ErrorCode::InvalidArgument, "constraint matrix must be symmetric");
      }
    }
  }

  // Cluster slots are indexed by smallest member; merging a < b keeps slot a.
  std::vector<char> active(n, 1);
  std::vector<int> size(n, 1);
  std::vector<long> version(n, 0);
  std::vector<int> parent(n, -1);  // merge forest for final label resolution
  Matrix cost(n, n);
  std::vector<char> linked(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    cost(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      // Ward cost of merging two singletons: half the squared distance.
      cost(i, j) = cost(j, i) = 0.5 * squared_distance(points, i, j);
      linked[static_cast<std::size_t>(i) * n + j] = linked[static_cast<std::size_t>(j) * n + i] =
          adjacency(i, j) != 0.0 && i != j;
    }
  }

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> heap;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (linked[static_cast<std::size_t>(i) * n + j]) heap.push({cost(i, j), i, j, 0, 0});
    }
  }

  WardResult result;
  result.merges.reserve(n - k);
  int remaining = n;
  while (remaining > k) {
    int a = -1;
    int b = -1;
    bool violation = false;
    while (!heap.empty()) {
      const Candidate top = heap.top();
      heap.pop();
      if (active[top.left] && active[top.right] && version[top.left] == top.version_left &&
          version[top.right] == top.version_right) {
        a = top.left;
        b = top.right;
        break;
      }
    }
    if (a < 0) {
      // Constraint graph exhausted (more components than k): fall back to the
      // globally cheapest pair and mark the step.
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        for (int j = i + 1; j < n; ++j) {
          if (active[j] && cost(i, j) < best) {
            best = cost(i, j);
            a = i;
            b = j;
          }
        }
      }
      violation = true;
    }

    const double merge_cost = cost(a, b);
    const int merged_size = size[a] + size[b];
    result.merges.push_back({a, b, merge_cost, merged_size, violation});
    parent[b] = a;
    active[b] = 0;
    for (int m = 0; m < n; ++m) {
      if (!active[m] || m == a) continue;
      // Lance-Williams update for the Ward cost increment.
      cost(a, m) = cost(m, a) =
          ((size[a] + size[m]) * cost(a, m) + (size[b] + size[m]) * cost(b, m) -
           size[m] * merge_cost) /
          (merged_size + size[m]);
      linked[static_cast<std::size_t>(a) * n + m] =
          linked[static_cast<std::size_t>(m) * n + a] =
              linked[static_cast<std::size_t>(a) * n + m] ||
              linked[static_cast<std::size_t>(b) * n + m];
    }
    size[a] = merged_size;
    version[a] += 1;
    for (int m = 0; m < n; ++m) {
      if (!active[m] || m == a || !linked[static_cast<std::size_t>(a) * n + m]) continue;
      const int lo = std::min(a, m);
      const int hi = std::max(a, m);
      heap.push({cost(a, m), lo, hi, version[lo], version[hi]});
    }
    --remaining;
  }

  std::vector<int> root(n);
  for (int i = 0; i < n; ++i) {
    int r = i;
    while (parent[r] >= 0) r = parent[r];
    root[i] = r;
  }
  // Roots are smallest members, so ascending root order numbers communities.
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    if (active[i]) order.push_back(i);
  }
  std::vector<int> label_of_root(n, 0);
  for (std::size_t c = 0; c < order.size(); ++c) label_of_root[order[c]] = static_cast<int>(c) + 1;
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = label_of_root[root[i]];
  result.assignment = CommunityAssignment{std::move(labels), remaining};
  result.assignment.validate();
  return result;
}

CommunityAssignment kmeans(const Matrix& points, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "no points to cluster");
  if (k < 1 || k > n) {
    throw Error(ErrorCode::InvalidK, "k must be in [1, " + std::to_string(n) + "]");
  }
  const int d = static_cast<int>(points.cols());
  Rng rng(seed);

  // k-means++ seeding: each next center drawn with probability proportional to
  // the squared distance from the centers chosen so far.
  Matrix centers(k, d);
  centers.row(0) = points.row(rng.uniform_int(n));
  Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      nearest(i) = std::min(nearest(i), (points.row(i) - centers.row(c - 1)).squaredNorm());
      total += nearest(i);
    }
    int pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (int i = 0; i < n; ++i) {
        cumulative += nearest(i);
        if (cumulative >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_int(n);  // all remaining points coincide with a center
    }
    centers.row(c) = points.row(pick);
  }

  auto assign = [&](std::vector<int>& labels) {
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dist = (points.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_d) {  // ties keep the lowest center index
          best_d = dist;
          best = c;
        }
      }
      labels[i] = best;
      ++counts[best];
    }
    // Refill any emptied cluster with the point farthest from its center.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int steal = -1;
      double worst = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double dist = (points.row(i) - centers.row(labels[i])).squaredNorm();
        if (dist > worst) {
          worst = dist;
          steal = i;
        }
      }
      --counts[labels[steal]];
      labels[steal] = c;
      ++counts[c];
    }
  };

  std::vector<int> labels(n, -1);
  assign(labels);
  constexpr int kMaxRounds = 300;
  for (int round = 0; round < kMaxRounds; ++round) {
    centers.setZero();
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      centers.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);
    std::vector<int> next(n);
    assign(next);
    if (next == labels) break;
    labels = next;
  }

  for (int& label : labels) ++label;
  return CommunityAssignment::from_labels(std::move(labels));
}

}  // namespace region2vec
