#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "mlgc/baselines.hpp"
#include "mlgc/clustering.hpp"
#include "mlgc/data_io.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/metrics.hpp"
#include "mlgc/objective.hpp"
#include "mlgc/optimizer.hpp"
#include "mlgc/rng.hpp"

namespace mlgc {

// Connected random graph: a random spanning tree plus each remaining pair
// independently with the given probability, weights uniform in [0.5, 2].
inline LayerGraph random_connected_layer(int n, std::mt19937_64& rng,
                                         double extra_edge_prob = 0.3) {
  std::vector<std::tuple<int, int, double>> edges;
  for (int i = 1; i < n; ++i) {
    edges.emplace_back(uniform_index(rng, i), i, uniform_in(rng, 0.5, 2.0));
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j, weight] : edges) {
    w(i, j) = weight;
    w(j, i) = weight;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (w(i, j) == 0.0 && uniform_unit(rng) < extra_edge_prob) {
        const double weight = uniform_in(rng, 0.5, 2.0);
        w(i, j) = weight;
        w(j, i) = weight;
      }
    }
  }
  return LayerGraph::from_adjacency(std::move(w));
}

inline MultilayerGraph random_multilayer(int n, int s, std::mt19937_64& rng) {
  std::vector<LayerGraph> layers;
  layers.reserve(s);
  for (int layer = 0; layer < s; ++layer) {
    layers.push_back(random_connected_layer(n, rng));
  }
  return MultilayerGraph(std::move(layers));
}

// ---------------------------------------------------------------------------
// Gradient check: analytic vs central finite-difference gradient on seeded
// random instances.
// ---------------------------------------------------------------------------

struct GradientCheckCase {
  int n = 0, k = 0, s = 0;
  std::uint64_t seed = 0;
  double relative_error = 0.0;
};

struct GradientCheckReport {
  std::vector<GradientCheckCase> cases;
  GradientCheckCase worst;
  bool passed(double tolerance = 1e-4) const {
    return worst.relative_error <= tolerance;
  }
};

inline GradientCheckReport run_gradient_check(int n_instances = 20,
                                              double gamma1 = 0.1,
                                              double gamma2 = 100.0,
                                              double fd_step = 1e-5) {
  const int ns[] = {6, 8, 10};
  const int ks[] = {2, 3};
  const int ss[] = {1, 2};
  GradientCheckReport report;
  for (int t = 0; t < n_instances; ++t) {
    GradientCheckCase c;
    c.n = ns[t % 3];
    c.k = ks[(t / 3) % 2];
    c.s = ss[(t / 6) % 2];
    c.seed = static_cast<std::uint64_t>(t + 1);

    std::mt19937_64 rng(c.seed);
    const MultilayerGraph g = random_multilayer(c.n, c.s, rng);
    const Embedding z = initialize_embedding(c.n, c.k, c.seed);
    ObjectiveConfig cfg;
    cfg.gamma1 = gamma1;
    cfg.gamma2 = gamma2;
    cfg.n_clusters = c.k;

    const Eigen::MatrixXd analytic = objective_gradient(z, g, cfg);
    const Eigen::MatrixXd numeric =
        finite_difference_gradient(z, g, cfg, fd_step);
    c.relative_error =
        (analytic - numeric).norm() / std::max(numeric.norm(), 1e-12);
    if (report.cases.empty() ||
        c.relative_error > report.worst.relative_error) {
      report.worst = c;
    }
    report.cases.push_back(c);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Proposed-vs-baseline comparison over seeded synthetic trials.
// ---------------------------------------------------------------------------

struct CompareConfig {
  SyntheticConfig synthetic;  // seed is replaced per trial
  ObjectiveConfig objective;
  OptimizerConfig optimizer;
  KMeansConfig kmeans;
  int n_trials = 10;
  std::uint64_t base_seed = 0;
};

struct TrialResult {
  std::uint64_t seed = 0;
  Scores embedding;  // optimized-embedding method
  Scores baseline;   // arithmetic-mean aggregation
  bool step_failure = false;
};

struct CompareResult {
  std::vector<TrialResult> trials;
};

// One synthetic draw scored for both methods. All per-trial randomness
// derives from the trial seed.
inline TrialResult run_trial(const CompareConfig& cfg, std::uint64_t seed) {
  SyntheticConfig synth = cfg.synthetic;
  synth.seed = seed;
  const Dataset data = generate_synthetic(synth);

  ObjectiveConfig obj = cfg.objective;
  obj.n_clusters = synth.n_components;
  OptimizerConfig opt = cfg.optimizer;
  opt.seed = seed;
  KMeansConfig km = cfg.kmeans;
  km.n_clusters = synth.n_components;
  km.seed = seed;

  TrialResult result;
  result.seed = seed;
  auto [z, trace] = optimize(data.graph, obj, opt);
  result.step_failure = trace.step_failure;
  result.embedding = score(cluster_embedding(z, km), data.truth);
  result.baseline = score(
      baseline_cluster(data.graph, synth.n_components,
                       BaselineMethod::ArithmeticMean, km),
      data.truth);
  return result;
}

inline CompareResult run_comparison(const CompareConfig& cfg) {
  CompareResult result;
  result.trials.reserve(cfg.n_trials);
  for (int t = 0; t < cfg.n_trials; ++t) {
    result.trials.push_back(run_trial(cfg, cfg.base_seed + t));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Order statistics for aggregating trial scores.
// ---------------------------------------------------------------------------

// Linearly interpolated quantile of an unsorted sample, p in [0, 1].
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = p * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - lo;
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

inline double median(const std::vector<double>& values) {
  return quantile(values, 0.5);
}

inline double interquartile_range(const std::vector<double>& values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

enum class Metric { Accuracy, Purity, Nmi, Ari };

inline double metric_of(const Scores& s, Metric m) {
  switch (m) {
    case Metric::Accuracy: return s.accuracy;
    case Metric::Purity: return s.purity;
    case Metric::Nmi: return s.nmi;
    case Metric::Ari: return s.ari;
  }
  return 0.0;
}

inline std::vector<double> collect_metric(const CompareResult& result,
                                          Metric m, bool embedding_method) {
  std::vector<double> values;
  values.reserve(result.trials.size());
  for (const TrialResult& t : result.trials) {
    values.push_back(metric_of(embedding_method ? t.embedding : t.baseline, m));
  }
  return values;
}

}  // namespace mlgc
