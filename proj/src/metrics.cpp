#include "region2vec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

namespace region2vec {

namespace {

void check_length(int n, const CommunityAssignment& assignment) {
  if (assignment.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "assignment length does not match data size");
  }
}

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (const double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double flow_ratio(const FlowMatrix& flows, const CommunityAssignment& assignment) {
  const int n = flows.n();
  check_length(n, assignment);
  double intra = 0.0;
  double inter = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (assignment.labels[i] == assignment.labels[j]) {
        intra += flows.s(i, j);
      } else {
        inter += flows.s(i, j);
      }
    }
  }
  if (inter <= 0.0) {
    throw Error(ErrorCode::NoInterFlow, "no flow crosses community boundaries");
  }
  return intra / inter;
}

InequalityResult inequality(const Vector& values, const CommunityAssignment& assignment) {
  const int n = static_cast<int>(values.size());
  check_length(n, assignment);
  InequalityResult result;
  result.per_community.resize(assignment.k);
  for (int c = 1; c <= assignment.k; ++c) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (assignment.labels[i] == c) {
        sum += values(i);
        ++count;
      }
    }
    const double mean = sum / count;
    if (!(mean > 0.0 && mean < 1.0)) {
      throw Error(ErrorCode::DegenerateMean,
                  "community " + std::to_string(c) + " has mean outside (0,1)");
    }
    double variance = 0.0;
    for (int i = 0; i < n; ++i) {
      if (assignment.labels[i] == c) {
        const double d = values(i) - mean;
        variance += d * d;
      }
    }
    variance /= count;
    result.per_community[c - 1] = std::sqrt(variance) / std::sqrt(mean * (1.0 - mean));
  }
  std::vector<double> sorted = result.per_community;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  result.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return result;
}

double cosine_mean(const AttributeMatrix& attributes, const CommunityAssignment& assignment) {
  const int n = static_cast<int>(attributes.rows());
  check_length(n, assignment);
  Vector norms(n);
  for (int i = 0; i < n; ++i) {
    norms(i) = attributes.x.row(i).norm();
    if (norms(i) <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "attribute row " + std::to_string(i) + " has zero norm");
    }
  }
  double total = 0.0;
  long pairs = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (assignment.labels[i] != assignment.labels[j]) continue;
      total += attributes.x.row(i).dot(attributes.x.row(j)) / (norms(i) * norms(j));
      ++pairs;
    }
  }
  if (pairs == 0) {
    throw Error(ErrorCode::NoPairs, "every community is a singleton");
  }
  return total / static_cast<double>(pairs);
}

double homogeneity(const Vector& poverty_share, const CommunityAssignment& assignment,
                   int bins) {
  const int n = static_cast<int>(poverty_share.size());
  check_length(n, assignment);
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be >= 2");

  // Quantile cut points; class(v) counts the cuts at or below v.
  std::vector<double> sorted(poverty_share.data(), poverty_share.data() + n);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts(bins - 1);
  for (int j = 1; j < bins; ++j) {
    cuts[j - 1] = sorted[static_cast<std::size_t>(j) * n / bins];
  }
  std::vector<int> klass(n, 0);
  for (int i = 0; i < n; ++i) {
    for (const double cut : cuts) {
      if (poverty_share(i) >= cut) ++klass[i];
    }
  }

  std::vector<double> class_counts(bins, 0.0);
  for (int i = 0; i < n; ++i) class_counts[klass[i]] += 1.0;
  const double h_class = entropy(class_counts, n);
  if (h_class <= 0.0) return 1.0;

  double h_conditional = 0.0;
  for (int c = 1; c <= assignment.k; ++c) {
    std::vector<double> counts(bins, 0.0);
    double cluster_size = 0.0;
    for (int i = 0; i < n; ++i) {
      if (assignment.labels[i] == c) {
        counts[klass[i]] += 1.0;
        cluster_size += 1.0;
      }
    }
    h_conditional += (cluster_size / n) * entropy(counts, cluster_size);
  }
  return 1.0 - h_conditional / h_class;
}

double adjusted_rand(const CommunityAssignment& a, const CommunityAssignment& b) {
  const int n = a.size();
  if (b.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "assignments have different lengths");
  }
  if (n < 2) return 1.0;  // no pairs to disagree on
  std::vector<std::vector<long>> table(a.k, std::vector<long>(b.k, 0));
  for (int i = 0; i < n; ++i) ++table[a.labels[i] - 1][b.labels[i] - 1];

  auto choose2 = [](long m) { return 0.5 * m * (m - 1); };
  double index = 0.0;
  double rows = 0.0;
  double cols = 0.0;
  for (int r = 0; r < a.k; ++r) {
    long row_sum = 0;
    for (int c = 0; c < b.k; ++c) {
      index += choose2(table[r][c]);
      row_sum += table[r][c];
    }
    rows += choose2(row_sum);
  }
  for (int c = 0; c < b.k; ++c) {
    long col_sum = 0;
    for (int r = 0; r < a.k; ++r) col_sum += table[r][c];
    cols += choose2(col_sum);
  }
  const double expected = rows * cols / choose2(n);
  const double maximum = 0.5 * (rows + cols);
  if (std::abs(maximum - expected) < 1e-12) return 1.0;  // both partitions trivial
  return (index - expected) / (maximum - expected);
}

MetricsReport evaluate(const Dataset& dataset, const CommunityAssignment& assignment,
                       int bins, const CommunityAssignment* reference) {
  MetricsReport report;
  report.flow_ratio = flow_ratio(dataset.flows, assignment);
  const InequalityResult ineq = inequality(dataset.poverty_share, assignment);
  report.inequality_median = ineq.median;
  report.inequality_per_community = ineq.per_community;
  report.cosine_mean = cosine_mean(dataset.attributes, assignment);
  report.homogeneity = homogeneity(dataset.poverty_share, assignment, bins);
  if (reference) report.adjusted_rand = adjusted_rand(assignment, *reference);
  return report;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json j;  // keys serialize alphabetically
  j["flow_ratio"] = report.flow_ratio;
  j["inequality_median"] = report.inequality_median;
  j["inequality_per_community"] = report.inequality_per_community;
  j["cosine_mean"] = report.cosine_mean;
  j["homogeneity"] = report.homogeneity;
  if (report.adjusted_rand) j["adjusted_rand"] = *report.adjusted_rand;
  return j.dump(2) + "\n";
}

}  // namespace region2vec
