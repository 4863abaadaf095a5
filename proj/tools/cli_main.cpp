// Command-line front end for the region2vec pipeline. Talks to the core
// library exclusively through the C API so it exercises the same surface as
// any other binding.

#include "region2vec.h"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

namespace {

struct Options {
  std::string nodes;
  std::string adjacency;
  std::string flows;
  std::string labels;
  std::string ground_truth;
  std::string embeddings;
  std::string out_dir = ".";
  std::string method;
  std::string config_path;
  std::vector<std::string> external_labels;  // name=path
  int k = 0;                                 // 0 = take Louvain's community count
  unsigned long long seed = 0;
  bool seed_given = false;
  int bins = 5;
  // training
  int epsilon = 2;
  int hidden = 64;
  int output_dim = 16;
  int iterations = 400;
  double lr = 0.01;
  // generator
  int rows = 10;
  int cols = 10;
  int k_true = 5;
  double intra_mean = 15.0;
  double inter_mean = 1.0;
  int attr_dims = 4;
  double separation = 1.0;
};

void check(int rc) {
  if (rc == R2V_OK) return;
  std::cerr << r2v_last_error() << "\n";
  std::exit(1);
}

[[noreturn]] void config_error(const std::string& message) {
  std::cerr << "cli.ConfigError: " << message << "\n";
  std::exit(1);
}

// Applies a flat key=value config file to the parsed subcommand. CLI11 only
// processes config files registered on the root app (sectioned per
// subcommand), so the flat per-subcommand form is handled here: each key must
// name a long option of the subcommand, and options already given on the
// command line keep their values.
void apply_config(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path);

  const auto trim = [](std::string text) {
    const auto from = text.find_first_not_of(" \t\r");
    const auto to = text.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : text.substr(from, to - from + 1);
  };

  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0) {
      config_error(path + ":" + std::to_string(line_number) + " is not key=value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    CLI::Option* option = cmd.get_option_no_throw("--" + key);
    if (option == nullptr) {
      config_error("unknown config key '" + key + "' for " + cmd.get_name());
    }
    if (option->count() > 0) continue;  // command-line flag wins
    option->add_result(value);
    option->run_callback();
  }
}

std::string shortest(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string fixed4(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) config_error("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) config_error("cannot write " + path);
  out << text;
}

r2v_dataset* load_dataset_or_die(const Options& opt) {
  if (opt.nodes.empty() || opt.adjacency.empty() || opt.flows.empty()) {
    config_error("--nodes, --adjacency, and --flows are required");
  }
  r2v_dataset* dataset = nullptr;
  check(r2v_dataset_load(opt.nodes.c_str(), opt.adjacency.c_str(), opt.flows.c_str(),
                         opt.ground_truth.empty() ? nullptr : opt.ground_truth.c_str(),
                         &dataset));
  return dataset;
}

r2v_training_config training_config(const Options& opt) {
  r2v_training_config config;
  r2v_training_config_default(&config);
  config.hop_threshold = opt.epsilon;
  config.hidden_width = opt.hidden;
  config.output_width = opt.output_dim;
  config.iterations = opt.iterations;
  config.learning_rate = opt.lr;
  if (opt.seed_given) config.seed = opt.seed;
  return config;
}

void run_generate(const Options& opt) {
  r2v_synth_config config;
  r2v_synth_config_default(&config);
  config.grid_rows = opt.rows;
  config.grid_cols = opt.cols;
  config.k_true = opt.k_true;
  config.intra_flow_mean = opt.intra_mean;
  config.inter_flow_mean = opt.inter_mean;
  config.attribute_dims = opt.attr_dims;
  config.attribute_separation = opt.separation;
  if (opt.seed_given) config.seed = opt.seed;

  r2v_dataset* dataset = nullptr;
  check(r2v_dataset_generate(&config, &dataset));
  ensure_out_dir(opt.out_dir);
  check(r2v_dataset_write(dataset, opt.out_dir.c_str()));
  r2v_dataset_free(dataset);
}

void run_embed(const Options& opt) {
  r2v_dataset* dataset = load_dataset_or_die(opt);
  const r2v_training_config config = training_config(opt);
  ensure_out_dir(opt.out_dir);
  const std::string trace_path = join_path(opt.out_dir, "loss_trace.csv");
  r2v_matrix* z = nullptr;
  check(r2v_train(dataset, &config, trace_path.c_str(), &z));
  check(r2v_write_embeddings(dataset, z, join_path(opt.out_dir, "embeddings.csv").c_str()));
  r2v_matrix_free(z);
  r2v_dataset_free(dataset);
}

void run_cluster(const Options& opt) {
  if (opt.embeddings.empty()) config_error("--embeddings is required");
  if (opt.k < 1) config_error("--k is required and must be positive");
  r2v_dataset* dataset = load_dataset_or_die(opt);
  r2v_matrix* z = nullptr;
  check(r2v_read_embeddings(dataset, opt.embeddings.c_str(), &z));
  int violations = 0;
  r2v_labels* labels = nullptr;
  check(r2v_ward_cluster(dataset, z, opt.k, &violations, &labels));
  if (violations > 0) {
    std::cerr << "note: " << violations
              << " merge(s) crossed the contiguity constraint (disconnected adjacency)\n";
  }
  ensure_out_dir(opt.out_dir);
  check(r2v_write_labels(dataset, labels,
                         join_path(opt.out_dir, "labels_region2vec.csv").c_str()));
  r2v_labels_free(labels);
  r2v_matrix_free(z);
  r2v_dataset_free(dataset);
}

std::string method_from_labels_path(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  if (stem.rfind("labels_", 0) == 0) stem = stem.substr(7);
  return stem.empty() ? "labels" : stem;
}

void run_evaluate(const Options& opt) {
  if (opt.labels.empty()) config_error("--labels is required");
  r2v_dataset* dataset = load_dataset_or_die(opt);
  r2v_labels* labels = nullptr;
  check(r2v_read_labels(dataset, opt.labels.c_str(), &labels));
  r2v_labels* reference = nullptr;
  check(r2v_dataset_ground_truth(dataset, &reference));

  char* json = nullptr;
  check(r2v_evaluate_json(dataset, labels, opt.bins, reference, &json));
  const std::string method =
      opt.method.empty() ? method_from_labels_path(opt.labels) : opt.method;
  ensure_out_dir(opt.out_dir);
  write_text(join_path(opt.out_dir, "metrics_" + method + ".json"), json);

  r2v_string_free(json);
  r2v_labels_free(reference);
  r2v_labels_free(labels);
  r2v_dataset_free(dataset);
}

struct BenchmarkRow {
  std::string method;
  r2v_metrics metrics;
};

// Marks, per metric, every row attaining the best value. Higher is better for
// everything except the inequality median.
std::vector<std::string> best_markers(const std::vector<BenchmarkRow>& rows, bool with_ari) {
  struct Column {
    const char* name;
    double r2v_metrics::*field;
    bool lower_is_better;
  };
  std::vector<Column> columns = {
      {"flow_ratio", &r2v_metrics::flow_ratio, false},
      {"inequality_median", &r2v_metrics::inequality_median, true},
      {"cosine_mean", &r2v_metrics::cosine_mean, false},
      {"homogeneity", &r2v_metrics::homogeneity, false},
  };
  if (with_ari) columns.push_back({"adjusted_rand", &r2v_metrics::adjusted_rand, false});

  std::vector<std::string> markers(rows.size());
  for (const auto& column : columns) {
    double best = rows[0].metrics.*column.field;
    for (const auto& row : rows) {
      const double v = row.metrics.*column.field;
      if (column.lower_is_better ? v < best : v > best) best = v;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].metrics.*column.field == best) {
        if (!markers[r].empty()) markers[r] += ";";
        markers[r] += column.name;
      }
    }
  }
  return markers;
}

void write_benchmark_table(const std::vector<BenchmarkRow>& rows, bool with_ari,
                           const std::string& out_dir) {
  const std::vector<std::string> markers = best_markers(rows, with_ari);

  std::string csv = "method,flow_ratio,inequality_median,cosine_mean,homogeneity";
  if (with_ari) csv += ",adjusted_rand";
  csv += ",best\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& m = rows[r].metrics;
    csv += rows[r].method + "," + shortest(m.flow_ratio) + "," +
           shortest(m.inequality_median) + "," + shortest(m.cosine_mean) + "," +
           shortest(m.homogeneity);
    if (with_ari) csv += "," + shortest(m.adjusted_rand);
    csv += "," + markers[r] + "\n";
  }
  write_text(join_path(out_dir, "benchmark.csv"), csv);

  std::vector<std::string> headers = {"method", "flow_ratio", "inequality_median",
                                      "cosine_mean", "homogeneity"};
  if (with_ari) headers.push_back("adjusted_rand");
  headers.push_back("best");
  std::vector<std::vector<std::string>> cells;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& m = rows[r].metrics;
    std::vector<std::string> row = {rows[r].method, fixed4(m.flow_ratio),
                                    fixed4(m.inequality_median), fixed4(m.cosine_mean),
                                    fixed4(m.homogeneity)};
    if (with_ari) row.push_back(fixed4(m.adjusted_rand));
    row.push_back(markers[r]);
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : cells) widths[c] = std::max(widths[c], row[c].size());
  }
  auto render = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(widths[c] - row[c].size() + 2, ' ');
    }
    line += "\n";
    return line;
  };
  std::string text = render(headers);
  for (const auto& row : cells) text += render(row);
  write_text(join_path(out_dir, "benchmark.txt"), text);
}

void run_benchmark(const Options& opt) {
  r2v_dataset* dataset = load_dataset_or_die(opt);
  r2v_labels* truth = nullptr;
  check(r2v_dataset_ground_truth(dataset, &truth));
  ensure_out_dir(opt.out_dir);

  std::vector<std::pair<std::string, r2v_labels*>> methods;

  // Louvain runs first: its community count sets K for the fixed-K methods.
  r2v_labels* louvain_labels = nullptr;
  const unsigned long long seed = opt.seed_given ? opt.seed : 42ull;
  check(r2v_louvain(dataset, seed, nullptr, nullptr, &louvain_labels));
  methods.emplace_back("Louvain", louvain_labels);
  const int k = opt.k > 0 ? opt.k : r2v_labels_k(louvain_labels);

  const r2v_training_config config = training_config(opt);
  r2v_matrix* z = nullptr;
  check(r2v_train(dataset, &config, join_path(opt.out_dir, "loss_trace.csv").c_str(), &z));
  check(r2v_write_embeddings(dataset, z, join_path(opt.out_dir, "embeddings.csv").c_str()));
  int violations = 0;
  r2v_labels* ward_labels = nullptr;
  check(r2v_ward_cluster(dataset, z, k, &violations, &ward_labels));
  if (violations > 0) {
    std::cerr << "note: " << violations
              << " merge(s) crossed the contiguity constraint (disconnected adjacency)\n";
  }
  methods.emplace_back("Region2vec", ward_labels);
  r2v_matrix_free(z);

  r2v_matrix* attributes = nullptr;
  check(r2v_dataset_attributes(dataset, &attributes));
  r2v_labels* kmeans_labels = nullptr;
  check(r2v_kmeans(attributes, k, seed, &kmeans_labels));
  methods.emplace_back("KMeans", kmeans_labels);
  r2v_matrix_free(attributes);

  for (const std::string& spec : opt.external_labels) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      config_error("--external-labels expects name=path, got '" + spec + "'");
    }
    r2v_labels* external = nullptr;
    check(r2v_read_labels(dataset, spec.substr(eq + 1).c_str(), &external));
    methods.emplace_back(spec.substr(0, eq), external);
  }

  std::vector<BenchmarkRow> rows;
  for (const auto& [name, labels] : methods) {
    std::string lower = name;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    check(r2v_write_labels(dataset, labels,
                           join_path(opt.out_dir, "labels_" + lower + ".csv").c_str()));
    r2v_metrics metrics;
    check(r2v_evaluate(dataset, labels, opt.bins, truth, &metrics));
    char* json = nullptr;
    check(r2v_evaluate_json(dataset, labels, opt.bins, truth, &json));
    write_text(join_path(opt.out_dir, "metrics_" + lower + ".json"), json);
    r2v_string_free(json);
    rows.push_back({name, metrics});
  }
  write_benchmark_table(rows, truth != nullptr, opt.out_dir);

  for (auto& [name, labels] : methods) r2v_labels_free(labels);
  r2v_labels_free(truth);
  r2v_dataset_free(dataset);
}

void add_dataset_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--nodes", opt.nodes, "nodes.csv path");
  cmd->add_option("--adjacency", opt.adjacency, "adjacency.csv path");
  cmd->add_option("--flows", opt.flows, "flows.csv path");
  cmd->add_option("--ground-truth", opt.ground_truth, "ground_truth.csv path (optional)");
}

void add_training_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--epsilon", opt.epsilon, "hop threshold for the repulsion term");
  cmd->add_option("--hidden", opt.hidden, "hidden layer width");
  cmd->add_option("--output-dim", opt.output_dim, "embedding dimension");
  cmd->add_option("--iterations", opt.iterations, "training iterations");
  cmd->add_option("--lr", opt.lr, "Adam learning rate");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"region2vec: spatial community detection pipeline"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", opt.out_dir, "output directory (default .)");
    cmd->add_option("--seed", opt.seed, "random seed")->each([&](const std::string&) {
      opt.seed_given = true;
    });
    cmd->add_option("--config", opt.config_path,
                    "flat key=value config file; flags override it");
    return cmd;
  };

  CLI::App* generate = add_common(app.add_subcommand("generate", "write a synthetic dataset"));
  generate->add_option("--rows", opt.rows, "grid rows");
  generate->add_option("--cols", opt.cols, "grid columns");
  generate->add_option("--k-true", opt.k_true, "planted community count");
  generate->add_option("--intra-mean", opt.intra_mean, "intra-community Poisson flow mean");
  generate->add_option("--inter-mean", opt.inter_mean, "inter-community Poisson flow mean");
  generate->add_option("--attr-dims", opt.attr_dims, "attribute dimensions beyond poverty");
  generate->add_option("--separation", opt.separation, "attribute center separation");

  CLI::App* embed = add_common(app.add_subcommand("embed", "train embeddings"));
  add_dataset_flags(embed, opt);
  add_training_flags(embed, opt);

  CLI::App* cluster =
      add_common(app.add_subcommand("cluster", "contiguity-constrained Ward on embeddings"));
  add_dataset_flags(cluster, opt);
  cluster->add_option("--embeddings", opt.embeddings, "embeddings.csv path");
  cluster->add_option("--k", opt.k, "community count");

  CLI::App* evaluate = add_common(app.add_subcommand("evaluate", "score a labels file"));
  add_dataset_flags(evaluate, opt);
  evaluate->add_option("--labels", opt.labels, "labels CSV to score");
  evaluate->add_option("--bins", opt.bins, "poverty quantile bins");
  evaluate->add_option("--method", opt.method, "method name for the metrics file");

  CLI::App* benchmark =
      add_common(app.add_subcommand("benchmark", "compare methods on one dataset"));
  add_dataset_flags(benchmark, opt);
  add_training_flags(benchmark, opt);
  benchmark->add_option("--k", opt.k, "community count override (default: Louvain's)");
  benchmark->add_option("--bins", opt.bins, "poverty quantile bins");
  benchmark->add_option("--external-labels", opt.external_labels,
                        "name=path of an externally produced labels CSV (repeatable)");

  CLI11_PARSE(app, argc, argv);

  // dispatch after parsing so config-file values land before any work starts
  CLI::App* active = app.get_subcommands().front();
  if (!opt.config_path.empty()) apply_config(*active, opt.config_path);
  if (active == generate) run_generate(opt);
  if (active == embed) run_embed(opt);
  if (active == cluster) run_cluster(opt);
  if (active == evaluate) run_evaluate(opt);
  if (active == benchmark) run_benchmark(opt);
  return 0;
}
