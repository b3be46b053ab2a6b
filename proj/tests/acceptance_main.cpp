// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in the checks themselves.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mlgc/mlgc.hpp>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace mlgc;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// --- oracles -----------------------------------------------------------

double ari_pair_counting(const ClusterLabels& pred,
                         const ClusterLabels& truth) {
  const int n = pred.size();
  double both = 0, pred_only = 0, truth_only = 0, neither = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same_pred = pred.ids[i] == pred.ids[j];
      const bool same_truth = truth.ids[i] == truth.ids[j];
      if (same_pred && same_truth) ++both;
      else if (same_pred) ++pred_only;
      else if (same_truth) ++truth_only;
      else ++neither;
    }
  }
  const double total = both + pred_only + truth_only + neither;
  if (total == 0) return 1.0;
  const double expected = (both + pred_only) * (both + truth_only) / total;
  const double max_index = 0.5 * ((both + pred_only) + (both + truth_only));
  if (max_index - expected == 0.0) return 1.0;
  return (both - expected) / (max_index - expected);
}

double accuracy_exhaustive(const Eigen::MatrixXi& counts) {
  const int m = static_cast<int>(std::max(counts.rows(), counts.cols()));
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  long long best = 0;
  do {
    long long matched = 0;
    for (int a = 0; a < counts.rows(); ++a) {
      if (perm[a] < counts.cols()) matched += counts(a, perm[a]);
    }
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / counts.sum();
}

double purity_from_labels(const ClusterLabels& pred,
                          const ClusterLabels& truth) {
  const int kp = pred.n_clusters(), kt = truth.n_clusters();
  std::vector<std::vector<long long>> counts(kp,
                                             std::vector<long long>(kt, 0));
  for (int i = 0; i < pred.size(); ++i) ++counts[pred.ids[i]][truth.ids[i]];
  long long sum = 0;
  for (const auto& row : counts) {
    sum += *std::max_element(row.begin(), row.end());
  }
  return static_cast<double>(sum) / pred.size();
}

double nmi_direct(const ClusterLabels& pred, const ClusterLabels& truth) {
  // integer counts keep the degenerate cases exact (6/6 = 1.0, log 1 = 0)
  const double n = pred.size();
  const int kp = pred.n_clusters(), kt = truth.n_clusters();
  std::vector<long long> ca(kp, 0), cb(kt, 0);
  std::vector<std::vector<long long>> cab(kp, std::vector<long long>(kt, 0));
  for (int i = 0; i < pred.size(); ++i) {
    ++ca[pred.ids[i]];
    ++cb[truth.ids[i]];
    ++cab[pred.ids[i]][truth.ids[i]];
  }
  double ha = 0, hb = 0, mi = 0;
  for (long long c : ca)
    if (c > 0) ha -= (c / n) * std::log(c / n);
  for (long long c : cb)
    if (c > 0) hb -= (c / n) * std::log(c / n);
  for (int a = 0; a < kp; ++a)
    for (int b = 0; b < kt; ++b)
      if (cab[a][b] > 0) {
        mi += (cab[a][b] / n) *
              std::log((static_cast<double>(cab[a][b]) * n) /
                       (static_cast<double>(ca[a]) * cb[b]));
      }
  if (ha == 0 && hb == 0) return 1.0;
  if (ha == 0 || hb == 0) return 0.0;
  return mi / std::sqrt(ha * hb);
}

// expand a contingency table into canonical label vectors
void labels_from_table(const Eigen::MatrixXi& counts, ClusterLabels& pred,
                       ClusterLabels& truth) {
  pred.ids.clear();
  truth.ids.clear();
  for (int a = 0; a < counts.rows(); ++a) {
    for (int b = 0; b < counts.cols(); ++b) {
      for (int c = 0; c < counts(a, b); ++c) {
        pred.ids.push_back(a);
        truth.ids.push_back(b);
      }
    }
  }
}

// --- criteria ----------------------------------------------------------

bool criterion_gradients(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const GradientCheckReport report = run_gradient_check(20, 0.1, 100.0);
  const double seconds = elapsed_seconds(start);
  std::ostringstream out;
  out << "worst relative error " << report.worst.relative_error << " (N="
      << report.worst.n << ", K=" << report.worst.k << ", S="
      << report.worst.s << ") over 20 instances in " << seconds << "s";
  detail = out.str();
  return report.worst.relative_error <= 1e-4 && seconds < 30.0;
}

bool criterion_resistance_identities(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + uniform_index(rng, 10);  // N <= 12
    const LaplacianMatrix l = build_laplacian(random_connected_layer(n, rng));
    const double spectral = total_effective_resistance(l);
    const double trace_route = n * laplacian_pseudoinverse(l).trace();
    double pairwise = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        pairwise += effective_resistance(l, i, j);
    worst = std::max(worst, std::abs(trace_route - spectral) /
                                std::abs(spectral));
    worst = std::max(worst, std::abs(pairwise - spectral) /
                                std::abs(spectral));
  }
  const double seconds = elapsed_seconds(start);
  std::ostringstream out;
  out << "worst relative spread " << worst << " across 50 graphs in "
      << seconds << "s";
  detail = out.str();
  return worst <= 1e-8 && seconds < 10.0;
}

bool criterion_spectral_structure(std::string& detail) {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 4;  // K in {2,...,5}
    Eigen::MatrixXd w;
    // K disjoint connected blobs, sizes 2..5
    {
      std::vector<int> sizes(k);
      int n = 0;
      for (int c = 0; c < k; ++c) {
        sizes[c] = 2 + uniform_index(rng, 4);
        n += sizes[c];
      }
      w = Eigen::MatrixXd::Zero(n, n);
      int offset = 0;
      for (int c = 0; c < k; ++c) {
        for (int i = 1; i < sizes[c]; ++i) {
          const int a = offset + uniform_index(rng, i);
          const int b = offset + i;
          w(a, b) = w(b, a) = uniform_in(rng, 0.5, 2.0);
        }
        offset += sizes[c];
      }
    }
    const LaplacianMatrix l =
        build_laplacian(LayerGraph::from_adjacency(std::move(w)));
    const EigenDecomposition eig = eigendecompose(l.entries);
    int zeros = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
      if (eig.eigenvalues(i) <= 1e-8) ++zeros;
    }
    if (zeros != k) {
      detail = "expected " + std::to_string(k) + " zero eigenvalues, got " +
               std::to_string(zeros);
      return false;
    }
    if (eig.eigenvalues(k) <= 1e-6) {
      detail = "lambda_{K+1} not separated from zero";
      return false;
    }
    if (community_regularizer(l, k) > 1e-12) {
      detail = "community regularizer above 1e-12 on a K-component graph";
      return false;
    }
    ++checked;
  }
  detail = std::to_string(checked) + " blob graphs, K in {2..5}";
  return true;
}

bool criterion_constraint_monotonicity(std::string& detail) {
  double worst_violation = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SyntheticConfig synth;
    synth.seed = seed;
    const Dataset data = generate_synthetic(synth);
    ObjectiveConfig obj;
    obj.n_clusters = 5;
    OptimizerConfig opt;
    opt.seed = seed;
    const auto [z, trace] = optimize(data.graph, obj, opt);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      worst_violation =
          std::max(worst_violation, trace.records[i].constraint_violation);
      if (trace.records[i].constraint_violation > 1e-8) {
        detail = "constraint violation above 1e-8";
        return false;
      }
      if (i > 0 &&
          trace.records[i].objective > trace.records[i - 1].objective) {
        detail = "objective increased across an accepted step";
        return false;
      }
    }
  }
  std::ostringstream out;
  out << "3 optimizer runs, worst constraint violation " << worst_violation;
  detail = out.str();
  return true;
}

bool criterion_synthetic_benchmark(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  CompareConfig cfg;  // defaults: N=50, S=3, K=5, knn=20, gammas 0.1 / 100
  cfg.n_trials = 10;
  cfg.base_seed = 1;
  const CompareResult result = run_comparison(cfg);
  const double seconds = elapsed_seconds(start);

  const double acc_embedding =
      median(collect_metric(result, Metric::Accuracy, true));
  const double acc_baseline =
      median(collect_metric(result, Metric::Accuracy, false));
  const double ari_embedding =
      median(collect_metric(result, Metric::Ari, true));
  const double ari_baseline =
      median(collect_metric(result, Metric::Ari, false));

  std::ostringstream out;
  out << "median accuracy " << acc_embedding << " vs " << acc_baseline
      << ", median ARI " << ari_embedding << " vs " << ari_baseline << " in "
      << seconds << "s";
  detail = out.str();
  return acc_embedding >= 0.60 && acc_embedding - acc_baseline >= 0.15 &&
         ari_embedding > ari_baseline && seconds < 600.0;
}

bool criterion_metric_oracles(std::string& detail) {
  // all K_pred x K_true tables with K <= 3 and 1 <= N <= 8
  long long tables = 0;
  std::vector<int> cells(9, 0);
  std::function<bool(int, int)> enumerate = [&](int cell, int budget) -> bool {
    if (cell == 9) {
      Eigen::MatrixXi counts(3, 3);
      for (int i = 0; i < 9; ++i) counts(i / 3, i % 3) = cells[i];
      if (counts.sum() == 0) return true;
      ++tables;
      ClusterLabels pred, truth;
      labels_from_table(counts, pred, truth);
      const ContingencyTable t = contingency(pred, truth);
      if (std::abs(accuracy(t) - accuracy_exhaustive(counts)) > 1e-12)
        return false;
      if (std::abs(purity(t) - purity_from_labels(pred, truth)) > 1e-12)
        return false;
      if (std::abs(nmi(t) - nmi_direct(pred, truth)) > 1e-12) return false;
      if (std::abs(adjusted_rand_index(t) - ari_pair_counting(pred, truth)) >
          1e-12)
        return false;
      return true;
    }
    for (int v = 0; v <= budget; ++v) {
      cells[cell] = v;
      if (!enumerate(cell + 1, budget - v)) return false;
    }
    cells[cell] = 0;
    return true;
  };
  if (!enumerate(0, 8)) {
    detail = "oracle mismatch on an enumerated contingency table";
    return false;
  }

  // permutation invariance over 100 random permutations
  std::mt19937_64 rng(9);
  std::vector<int> pred_ids(60), truth_ids(60);
  for (int i = 0; i < 60; ++i) {
    pred_ids[i] = uniform_index(rng, 5);
    truth_ids[i] = uniform_index(rng, 4);
  }
  const ClusterLabels pred{pred_ids}, truth{truth_ids};
  const Scores base = score(pred, truth);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> perm_p(5), perm_t(4);
    std::iota(perm_p.begin(), perm_p.end(), 0);
    std::iota(perm_t.begin(), perm_t.end(), 0);
    for (int i = 4; i > 0; --i)
      std::swap(perm_p[i], perm_p[uniform_index(rng, i + 1)]);
    for (int i = 3; i > 0; --i)
      std::swap(perm_t[i], perm_t[uniform_index(rng, i + 1)]);
    ClusterLabels pred2 = pred, truth2 = truth;
    for (int i = 0; i < 60; ++i) {
      pred2.ids[i] = perm_p[pred.ids[i]];
      truth2.ids[i] = perm_t[truth.ids[i]];
    }
    const Scores permuted = score(pred2, truth2);
    if (std::abs(permuted.accuracy - base.accuracy) > 1e-12 ||
        std::abs(permuted.purity - base.purity) > 1e-12 ||
        std::abs(permuted.nmi - base.nmi) > 1e-12 ||
        std::abs(permuted.ari - base.ari) > 1e-12) {
      detail = "metric changed under a label permutation";
      return false;
    }
  }
  detail = std::to_string(tables) +
           " contingency tables against oracles, 100 permutations";
  return true;
}

bool criterion_kmeans_optimality(std::string& detail) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + uniform_index(rng, 5);  // N <= 8
    Eigen::MatrixXd points(n, 2);
    for (int i = 0; i < n; ++i) {
      points(i, 0) = 2.0 * normal_sample(rng);
      points(i, 1) = 2.0 * normal_sample(rng);
    }
    KMeansConfig cfg;
    cfg.n_clusters = 2;
    cfg.seed = trial;
    const double reached = wcss(points, kmeans(points, cfg));

    double optimal = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << n); ++mask) {
      ClusterLabels labels;
      labels.ids.resize(n);
      for (int i = 0; i < n; ++i) labels.ids[i] = (mask >> i) & 1;
      optimal = std::min(optimal, wcss(points, labels));
    }
    if (reached > optimal * (1.0 + 1e-9) + 1e-12) {
      detail = "restart search missed the exhaustive optimum on trial " +
               std::to_string(trial);
      return false;
    }
  }
  detail = "20 instances, best-of-restarts equals the exhaustive optimum";
  return true;
}

bool criterion_loader_roundtrip(std::string& detail) {
  const fs::path dir =
      fs::temp_directory_path() / "mlgc_acceptance" / "roundtrip";
  fs::remove_all(dir);
  SyntheticConfig cfg;
  cfg.n_points = 30;
  cfg.n_layers = 3;
  cfg.n_components = 4;
  cfg.knn = 6;
  cfg.seed = 17;
  const Dataset data = generate_synthetic(cfg);
  save_multilayer(data.graph, data.truth, dir / "a");
  const auto [loaded, truth] = load_multilayer(dir / "a");
  if (!truth.has_value()) {
    detail = "labels lost in the round trip";
    return false;
  }
  save_multilayer(loaded, *truth, dir / "b");
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path other = dir / "b" / entry.path().filename();
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(other, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      detail = "file " + entry.path().filename().string() +
               " changed across save/load/save";
      return false;
    }
  }
  detail =
      "text-dataset ingestion is out of scope; generic loader round trip is "
      "byte-identical";
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"gradient correctness (analytic vs finite differences, <= 1e-4)",
       criterion_gradients},
      {"total-resistance identities agree within 1e-8",
       criterion_resistance_identities},
      {"K-component spectra: K zero eigenvalues, zero community penalty",
       criterion_spectral_structure},
      {"optimizer keeps the constraint and a monotone objective",
       criterion_constraint_monotonicity},
      {"synthetic benchmark: embedding method beats the arithmetic mean",
       criterion_synthetic_benchmark},
      {"metric oracles exact on all small contingency tables",
       criterion_metric_oracles},
      {"k-means best-of-restarts is optimal at desk scale",
       criterion_kmeans_optimality},
      {"generic loader round trip is byte-identical",
       criterion_loader_roundtrip},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %zu. %s: %s\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
