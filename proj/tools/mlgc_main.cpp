// mlgc command-line front end: synthetic dataset generation, embedding-based
// clustering, the arithmetic-mean baseline, evaluation, gradient checking,
// method comparison, and representative-graph export.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mlgc/mlgc.hpp>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::string config_path;
  std::string in_dir;
  std::string out_dir = "out";
  std::string pred_path;
  std::string truth_path;
  std::uint64_t seed = 0;
  double gamma1 = 0.1;
  double gamma2 = 100.0;
  int k = 5;
  int iters = 500;
  double step = 0.1;
  int trials = 10;
  int n = 50;
  int layers = 3;
  int knn = 20;
  int restarts = 20;
  double cov_scale = 1.0;
  double tol = 1e-7;
  int gradcheck_trials = 20;
  std::vector<std::vector<mlgc::GaussianComponent>> components;
};

// "components": [layer][component] objects {"mean": [x, y],
// "cov": [[a, b], [c, d]]} pinning the mixture parameters exactly.
std::vector<std::vector<mlgc::GaussianComponent>> parse_components(
    const nlohmann::json& spec_json) {
  std::vector<std::vector<mlgc::GaussianComponent>> layers;
  for (const auto& layer : spec_json) {
    std::vector<mlgc::GaussianComponent> parsed;
    for (const auto& comp : layer) {
      mlgc::GaussianComponent c;
      const auto& mean = comp.at("mean");
      const auto& cov = comp.at("cov");
      if (mean.size() != 2 || cov.size() != 2 || cov.at(0).size() != 2 ||
          cov.at(1).size() != 2) {
        throw mlgc::ConfigError("components need 2-D means and 2x2 covariances");
      }
      c.mean << mean.at(0).get<double>(), mean.at(1).get<double>();
      c.covariance << cov.at(0).at(0).get<double>(),
          cov.at(0).at(1).get<double>(), cov.at(1).at(0).get<double>(),
          cov.at(1).at(1).get<double>();
      parsed.push_back(c);
    }
    layers.push_back(std::move(parsed));
  }
  return layers;
}

// JSON config file with flat keys mirroring the run options; values set on
// the command line take precedence over the file.
void apply_config_file(const CLI::App* cmd, RunOptions& opt) {
  if (opt.config_path.empty()) return;
  std::ifstream in(opt.config_path);
  if (!in) {
    throw mlgc::ConfigError("cannot open config file " + opt.config_path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw mlgc::ConfigError(opt.config_path + ": " + e.what());
  }
  auto overridden = [&](const std::string& flag) {
    const CLI::Option* o = cmd->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "in") {
        if (!overridden("--in")) opt.in_dir = value.get<std::string>();
      } else if (key == "out") {
        if (!overridden("--out")) opt.out_dir = value.get<std::string>();
      } else if (key == "seed") {
        if (!overridden("--seed")) opt.seed = value.get<std::uint64_t>();
      } else if (key == "gamma1") {
        if (!overridden("--gamma1")) opt.gamma1 = value.get<double>();
      } else if (key == "gamma2") {
        if (!overridden("--gamma2")) opt.gamma2 = value.get<double>();
      } else if (key == "k") {
        if (!overridden("--k")) opt.k = value.get<int>();
      } else if (key == "iters") {
        if (!overridden("--iters")) opt.iters = value.get<int>();
      } else if (key == "step") {
        if (!overridden("--step")) opt.step = value.get<double>();
      } else if (key == "trials") {
        if (!overridden("--trials")) opt.trials = value.get<int>();
      } else if (key == "n") {
        if (!overridden("--n")) opt.n = value.get<int>();
      } else if (key == "layers") {
        if (!overridden("--layers")) opt.layers = value.get<int>();
      } else if (key == "knn") {
        if (!overridden("--knn")) opt.knn = value.get<int>();
      } else if (key == "restarts") {
        if (!overridden("--restarts")) opt.restarts = value.get<int>();
      } else if (key == "cov_scale") {
        if (!overridden("--cov-scale")) opt.cov_scale = value.get<double>();
      } else if (key == "tol") {
        if (!overridden("--tol")) opt.tol = value.get<double>();
      } else if (key == "components") {
        opt.components = parse_components(value);
      } else {
        throw mlgc::ConfigError(opt.config_path + ": unknown config key '" +
                                key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw mlgc::ConfigError(opt.config_path + ": key '" + key +
                              "': " + e.what());
    }
  }
}

mlgc::ObjectiveConfig objective_config(const RunOptions& opt) {
  mlgc::ObjectiveConfig cfg;
  cfg.gamma1 = opt.gamma1;
  cfg.gamma2 = opt.gamma2;
  cfg.n_clusters = opt.k;
  return cfg;
}

mlgc::OptimizerConfig optimizer_config(const RunOptions& opt) {
  mlgc::OptimizerConfig cfg;
  cfg.max_iters = opt.iters;
  cfg.init_step = opt.step;
  cfg.tol_rel_obj = opt.tol;
  cfg.seed = opt.seed;
  return cfg;
}

mlgc::KMeansConfig kmeans_config(const RunOptions& opt) {
  mlgc::KMeansConfig cfg;
  cfg.n_clusters = opt.k;
  cfg.n_restarts = opt.restarts;
  cfg.seed = opt.seed;
  return cfg;
}

mlgc::SyntheticConfig synthetic_config(const RunOptions& opt) {
  mlgc::SyntheticConfig cfg;
  cfg.n_points = opt.n;
  cfg.n_layers = opt.layers;
  cfg.n_components = opt.k;
  cfg.knn = opt.knn;
  cfg.seed = opt.seed;
  cfg.covariance_scale = opt.cov_scale;
  cfg.components = opt.components;
  return cfg;
}

void write_trace(const mlgc::TrainTrace& trace, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw mlgc::IoError("cannot open " + path.string() + " for writing");
  out << "iter,objective,gradient_norm,step_size,constraint_violation\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const mlgc::IterationRecord& r = trace.records[i];
    out << i << "," << mlgc::detail::format_double(r.objective) << ","
        << mlgc::detail::format_double(r.gradient_norm) << ","
        << mlgc::detail::format_double(r.step_size) << ","
        << mlgc::detail::format_double(r.constraint_violation) << "\n";
  }
}

void print_scores(const mlgc::Scores& s) {
  std::cout << "accuracy " << s.accuracy << "\n"
            << "purity   " << s.purity << "\n"
            << "nmi      " << s.nmi << "\n"
            << "ari      " << s.ari << "\n";
}

int cmd_generate(const RunOptions& opt) {
  const mlgc::Dataset data = mlgc::generate_synthetic(synthetic_config(opt));
  mlgc::save_multilayer(data.graph, data.truth, opt.out_dir);
  std::cout << "wrote " << data.graph.n_layers() << " layers over "
            << data.graph.n_vertices() << " vertices to " << opt.out_dir
            << "\n";
  return kExitOk;
}

int cmd_cluster(const RunOptions& opt) {
  const auto [graph, truth] = mlgc::load_multilayer(opt.in_dir);
  const auto [embedding, trace] =
      mlgc::optimize(graph, objective_config(opt), optimizer_config(opt));
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const mlgc::IterationRecord& r = trace.records[i];
    std::cout << "iter " << i << "  objective " << r.objective << "  step "
              << r.step_size << "  constraint " << r.constraint_violation
              << "\n";
  }
  if (trace.degenerate_spectrum_events > 0) {
    std::cerr << "warning: " << trace.degenerate_spectrum_events
              << " iterations hit a near-degenerate spectrum at the K/K+1 "
                 "boundary\n";
  }

  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  mlgc::save_embedding(embedding, out / "embedding.txt");
  write_trace(trace, out / "trace.csv");
  const mlgc::ClusterLabels labels =
      mlgc::cluster_embedding(embedding, kmeans_config(opt));
  mlgc::save_labels(labels, out / "labels.txt");
  if (truth.has_value()) {
    const mlgc::Scores s = mlgc::score(labels, *truth);
    mlgc::save_scores(s, out / "scores.json");
    print_scores(s);
  }
  if (trace.step_failure) {
    std::cerr << "optimization line search failed before convergence; "
                 "outputs reflect the best iterate\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_baseline(const RunOptions& opt) {
  const auto [graph, truth] = mlgc::load_multilayer(opt.in_dir);
  const mlgc::ClusterLabels labels = mlgc::baseline_cluster(
      graph, opt.k, mlgc::BaselineMethod::ArithmeticMean, kmeans_config(opt));
  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  mlgc::save_labels(labels, out / "labels.txt");
  if (truth.has_value()) {
    const mlgc::Scores s = mlgc::score(labels, *truth);
    mlgc::save_scores(s, out / "scores.json");
    print_scores(s);
  }
  return kExitOk;
}

int cmd_eval(const RunOptions& opt) {
  const mlgc::ClusterLabels pred = mlgc::load_labels(opt.pred_path);
  const mlgc::ClusterLabels truth = mlgc::load_labels(opt.truth_path);
  const mlgc::Scores s = mlgc::score(pred, truth);
  print_scores(s);
  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    mlgc::save_scores(s, fs::path(opt.out_dir) / "scores.json");
  }
  return kExitOk;
}

int cmd_gradcheck(const RunOptions& opt) {
  const mlgc::GradientCheckReport report =
      mlgc::run_gradient_check(opt.gradcheck_trials, opt.gamma1, opt.gamma2);
  const mlgc::GradientCheckCase& w = report.worst;
  std::cout << "gradcheck: " << report.cases.size()
            << " instances, worst relative error " << w.relative_error
            << " (N=" << w.n << ", K=" << w.k << ", S=" << w.s
            << ", seed=" << w.seed << ")\n";
  const bool ok = report.passed(1e-4);
  std::cout << (ok ? "PASS" : "FAIL") << " (tolerance 1e-4)\n";
  return ok ? kExitOk : kExitNumerical;
}

std::string format_cell(double median_value, double iqr, bool with_iqr) {
  char buf[64];
  if (with_iqr) {
    std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", median_value, iqr);
  } else {
    std::snprintf(buf, sizeof(buf), "%.3f", median_value);
  }
  return buf;
}

int cmd_compare(const RunOptions& opt) {
  mlgc::CompareConfig cfg;
  cfg.synthetic = synthetic_config(opt);
  cfg.objective = objective_config(opt);
  cfg.optimizer = optimizer_config(opt);
  cfg.kmeans = kmeans_config(opt);
  cfg.n_trials = opt.trials;
  cfg.base_seed = opt.seed;
  const mlgc::CompareResult result = mlgc::run_comparison(cfg);

  const bool with_iqr = opt.trials > 1;
  const mlgc::Metric metrics[] = {mlgc::Metric::Accuracy,
                                  mlgc::Metric::Purity, mlgc::Metric::Nmi,
                                  mlgc::Metric::Ari};
  const char* metric_names[] = {"accuracy", "purity", "nmi", "ari"};
  const char* method_names[] = {"embedding", "arithmetic-mean"};

  std::ostringstream table;
  table << std::left << std::setw(18) << "method";
  for (const char* name : metric_names) table << std::setw(18) << name;
  table << "\n";
  nlohmann::json doc;
  doc["n_trials"] = opt.trials;
  for (int method = 0; method < 2; ++method) {
    const bool embedding_method = method == 0;
    table << std::left << std::setw(18) << method_names[method];
    for (int m = 0; m < 4; ++m) {
      const std::vector<double> values =
          mlgc::collect_metric(result, metrics[m], embedding_method);
      table << std::setw(18)
            << format_cell(mlgc::median(values),
                           mlgc::interquartile_range(values), with_iqr);
      doc["median"][method_names[method]][metric_names[m]] =
          mlgc::median(values);
      if (with_iqr) {
        doc["iqr"][method_names[method]][metric_names[m]] =
            mlgc::interquartile_range(values);
      }
    }
    table << "\n";
  }
  for (const mlgc::TrialResult& t : result.trials) {
    nlohmann::json trial;
    trial["seed"] = t.seed;
    trial["embedding"] = {{"accuracy", t.embedding.accuracy},
                          {"purity", t.embedding.purity},
                          {"nmi", t.embedding.nmi},
                          {"ari", t.embedding.ari}};
    trial["arithmetic-mean"] = {{"accuracy", t.baseline.accuracy},
                                {"purity", t.baseline.purity},
                                {"nmi", t.baseline.nmi},
                                {"ari", t.baseline.ari}};
    doc["trials"].push_back(trial);
  }

  std::cout << table.str();
  fs::create_directories(opt.out_dir);
  {
    std::ofstream out(fs::path(opt.out_dir) / "compare.txt");
    if (!out) throw mlgc::IoError("cannot write compare.txt");
    out << table.str();
  }
  {
    std::ofstream out(fs::path(opt.out_dir) / "compare.json");
    if (!out) throw mlgc::IoError("cannot write compare.json");
    out << doc.dump(2) << "\n";
  }
  return kExitOk;
}

// Graphviz color palette for cluster ids (cycled past 9 clusters).
const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a",
                          "#984ea3", "#ff7f00", "#ffff33",
                          "#a65628", "#f781bf", "#999999"};

int cmd_export(const RunOptions& opt) {
  const fs::path in(opt.in_dir);
  const mlgc::Embedding z = mlgc::load_embedding(in / "embedding.txt");
  std::optional<mlgc::ClusterLabels> labels;
  if (fs::exists(in / "labels.txt")) {
    labels = mlgc::load_labels(in / "labels.txt");
    if (labels->size() != z.n_vertices()) {
      throw mlgc::ParseError("labels.txt does not match the embedding size");
    }
  }

  const mlgc::SimilarityMatrix sims = mlgc::induced_similarity_matrix(z);
  const int n = z.n_vertices();
  std::vector<mlgc::LayerGraph> induced;
  {
    Eigen::MatrixXd w = sims.entries;
    w.diagonal().setZero();
    induced.push_back(mlgc::LayerGraph::from_adjacency(std::move(w)));
  }
  fs::create_directories(opt.out_dir);
  mlgc::save_multilayer(mlgc::MultilayerGraph(std::move(induced)),
                        std::nullopt, opt.out_dir);

  std::ofstream dot(fs::path(opt.out_dir) / "graph.dot");
  if (!dot) throw mlgc::IoError("cannot write graph.dot");
  dot << "graph representative {\n  node [style=filled];\n";
  for (int i = 0; i < n; ++i) {
    dot << "  " << i;
    if (labels.has_value()) {
      dot << " [fillcolor=\"" << kPalette[labels->ids[i] % 9] << "\"]";
    }
    dot << ";\n";
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (sims.entries(i, j) > 0.0) {
        dot << "  " << i << " -- " << j << " [weight="
            << mlgc::detail::format_double(sims.entries(i, j)) << "];\n";
      }
    }
  }
  dot << "}\n";
  std::cout << "wrote representative graph (" << n << " vertices) to "
            << opt.out_dir << "\n";
  return kExitOk;
}

void add_common_flags(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--config", opt.config_path,
                  "JSON config file; command-line flags override its values");
  cmd->add_option("--seed", opt.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilayer graph clustering via optimized node embeddings"};
  app.require_subcommand(1);
  RunOptions opt;

  CLI::App* generate =
      app.add_subcommand("generate", "write a synthetic multilayer dataset");
  add_common_flags(generate, opt);
  generate->add_option("--out", opt.out_dir, "output directory")->required();
  generate->add_option("--n", opt.n, "number of vertices");
  generate->add_option("--layers", opt.layers, "number of layers");
  generate->add_option("--k", opt.k, "number of mixture components");
  generate->add_option("--knn", opt.knn, "nearest neighbors per vertex");
  generate->add_option("--cov-scale", opt.cov_scale,
                       "mixture covariance scale (larger = more overlap)");

  CLI::App* cluster = app.add_subcommand(
      "cluster", "optimize the embedding and cluster its rows");
  add_common_flags(cluster, opt);
  cluster->add_option("--in", opt.in_dir, "input graph directory")->required();
  cluster->add_option("--out", opt.out_dir, "output directory");
  cluster->add_option("--gamma1", opt.gamma1, "resistance regularizer weight");
  cluster->add_option("--gamma2", opt.gamma2, "community regularizer weight");
  cluster->add_option("--k", opt.k, "number of clusters");
  cluster->add_option("--iters", opt.iters, "maximum optimizer iterations");
  cluster->add_option("--step", opt.step, "initial gradient step");
  cluster->add_option("--tol", opt.tol, "relative objective-change tolerance");
  cluster->add_option("--restarts", opt.restarts, "k-means restarts");

  CLI::App* baseline = app.add_subcommand(
      "baseline", "arithmetic-mean aggregation plus spectral clustering");
  add_common_flags(baseline, opt);
  baseline->add_option("--in", opt.in_dir, "input graph directory")
      ->required();
  baseline->add_option("--out", opt.out_dir, "output directory");
  baseline->add_option("--k", opt.k, "number of clusters");
  baseline->add_option("--restarts", opt.restarts, "k-means restarts");

  CLI::App* eval =
      app.add_subcommand("eval", "score a predicted labeling against truth");
  eval->add_option("pred", opt.pred_path, "predicted labels file")
      ->required();
  eval->add_option("truth", opt.truth_path, "ground-truth labels file")
      ->required();
  eval->add_option("--out", opt.out_dir, "directory for scores.json");

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic and finite-difference gradients");
  add_common_flags(gradcheck, opt);
  gradcheck->add_option("--trials", opt.gradcheck_trials,
                        "number of instances");
  gradcheck->add_option("--gamma1", opt.gamma1, "resistance regularizer weight");
  gradcheck->add_option("--gamma2", opt.gamma2, "community regularizer weight");

  CLI::App* compare = app.add_subcommand(
      "compare", "embedding method vs arithmetic-mean over seeded synthetic trials");
  add_common_flags(compare, opt);
  compare->add_option("--out", opt.out_dir, "output directory");
  compare->add_option("--trials", opt.trials, "number of seeded trials");
  compare->add_option("--gamma1", opt.gamma1, "resistance regularizer weight");
  compare->add_option("--gamma2", opt.gamma2, "community regularizer weight");
  compare->add_option("--k", opt.k, "clusters / mixture components");
  compare->add_option("--iters", opt.iters, "maximum optimizer iterations");
  compare->add_option("--step", opt.step, "initial gradient step");
  compare->add_option("--tol", opt.tol, "relative objective-change tolerance");
  compare->add_option("--n", opt.n, "number of vertices");
  compare->add_option("--layers", opt.layers, "number of layers");
  compare->add_option("--knn", opt.knn, "nearest neighbors per vertex");
  compare->add_option("--restarts", opt.restarts, "k-means restarts");
  compare->add_option("--cov-scale", opt.cov_scale,
                      "mixture covariance scale (larger = more overlap)");

  CLI::App* export_cmd = app.add_subcommand(
      "export", "induced representative graph from a cluster run");
  export_cmd->add_option("--in", opt.in_dir, "cluster output directory")
      ->required();
  export_cmd->add_option("--out", opt.out_dir, "export directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(generate)) {
      apply_config_file(generate, opt);
      return cmd_generate(opt);
    }
    if (app.got_subcommand(cluster)) {
      apply_config_file(cluster, opt);
      return cmd_cluster(opt);
    }
    if (app.got_subcommand(baseline)) {
      apply_config_file(baseline, opt);
      return cmd_baseline(opt);
    }
    if (app.got_subcommand(eval)) return cmd_eval(opt);
    if (app.got_subcommand(gradcheck)) {
      apply_config_file(gradcheck, opt);
      return cmd_gradcheck(opt);
    }
    if (app.got_subcommand(compare)) {
      apply_config_file(compare, opt);
      return cmd_compare(opt);
    }
    if (app.got_subcommand(export_cmd)) return cmd_export(opt);
  } catch (const mlgc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mlgc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mlgc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
