#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mlgc/errors.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/objective.hpp"
#include "mlgc/rng.hpp"
#include "mlgc/spectral.hpp"

namespace mlgc {

// Node-to-cluster assignment; ids are in [0, K).
struct ClusterLabels {
  std::vector<int> ids;
  int size() const { return static_cast<int>(ids.size()); }
  int n_clusters() const {
    int k = 0;
    for (int id : ids) k = std::max(k, id + 1);
    return k;
  }
};

struct KMeansConfig {
  int n_clusters = 2;
  int n_restarts = 20;
  int max_iters = 300;
  double tol = 1e-9;  // squared center movement below which Lloyd stops
  std::uint64_t seed = 0;
};

// Within-cluster sum of squares with centroids at the cluster means.
inline double wcss(const Eigen::MatrixXd& points, const ClusterLabels& labels) {
  if (labels.size() != points.rows()) {
    throw DimensionError("wcss: label count does not match point count");
  }
  const int k = labels.n_clusters();
  const Eigen::Index d = points.cols();
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels.ids[i]) += points.row(i);
    ++counts[labels.ids[i]];
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = labels.ids[i];
    total += (points.row(i) - sums.row(c) / counts[c]).squaredNorm();
  }
  return total;
}

namespace detail {

inline std::vector<int> kmeanspp_seeds(const Eigen::MatrixXd& points, int k,
                                       std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> centers;
  centers.push_back(uniform_index(rng, n));
  Eigen::VectorXd dist2 =
      (points.rowwise() - points.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = dist2.sum();
    int chosen = -1;
    if (total > 0.0) {
      const double target = uniform_unit(rng) * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += dist2(i);
        if (cum >= target) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = n - 1;
    } else {
      // all remaining points coincide with a center; take the lowest index
      // not already chosen
      for (int i = 0; i < n; ++i) {
        if (std::find(centers.begin(), centers.end(), i) == centers.end()) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = 0;
    }
    centers.push_back(chosen);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - points.row(chosen)).rowwise().squaredNorm());
  }
  return centers;
}

struct LloydResult {
  std::vector<int> labels;
  double wcss = std::numeric_limits<double>::infinity();
};

inline LloydResult lloyd(const Eigen::MatrixXd& points,
                         Eigen::MatrixXd centers, const KMeansConfig& cfg) {
  const int n = static_cast<int>(points.rows());
  const int k = cfg.n_clusters;
  std::vector<int> labels(n, 0);
  double prev_wcss = std::numeric_limits<double>::infinity();
  LloydResult result;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // assignment; ties go to the lower center index
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (points.row(i) - centers.row(c)).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      if (labels[i] != best) changed = true;
      labels[i] = best;
    }

    std::vector<int> counts(k, 0);
    for (int id : labels) ++counts[id];

    // empty clusters steal the farthest point of the largest cluster
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int largest = 0;
      for (int c2 = 1; c2 < k; ++c2) {
        if (counts[c2] > counts[largest]) largest = c2;
      }
      int victim = -1;
      double worst = -1.0;
      for (int i = 0; i < n; ++i) {
        if (labels[i] != largest) continue;
        const double d2 = (points.row(i) - centers.row(largest)).squaredNorm();
        if (d2 > worst) {
          worst = d2;
          victim = i;
        }
      }
      labels[victim] = c;
      --counts[largest];
      ++counts[c];
      changed = true;
    }

    Eigen::MatrixXd new_centers = Eigen::MatrixXd::Zero(k, points.cols());
    for (int i = 0; i < n; ++i) new_centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) new_centers.row(c) /= counts[c];

    double current = 0.0;
    for (int i = 0; i < n; ++i) {
      current += (points.row(i) - new_centers.row(labels[i])).squaredNorm();
    }
    if (current > prev_wcss + 1e-9 * std::max(1.0, prev_wcss)) {
      throw NumericalError("k-means objective increased across an iteration");
    }
    prev_wcss = current;
    result.labels = labels;
    result.wcss = current;

    const double movement =
        (new_centers - centers).rowwise().squaredNorm().maxCoeff();
    centers = std::move(new_centers);
    if (!changed || movement < cfg.tol) break;
  }
  return result;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding, best of cfg.n_restarts restarts
// by within-cluster sum of squares (ties keep the earlier restart).
// Deterministic for a fixed seed.
inline ClusterLabels kmeans(const Eigen::MatrixXd& points,
                            const KMeansConfig& cfg) {
  const int n = static_cast<int>(points.rows());
  if (cfg.n_clusters < 1 || cfg.n_clusters > n) {
    throw DimensionError("k-means needs 1 <= K <= N, got K = " +
                         std::to_string(cfg.n_clusters) + ", N = " +
                         std::to_string(n));
  }
  if (cfg.n_restarts < 1) throw ConfigError("k-means needs n_restarts >= 1");
  std::mt19937_64 master(cfg.seed);
  detail::LloydResult best;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    std::mt19937_64 rng(master());
    const std::vector<int> seeds =
        detail::kmeanspp_seeds(points, cfg.n_clusters, rng);
    Eigen::MatrixXd centers(cfg.n_clusters, points.cols());
    for (int c = 0; c < cfg.n_clusters; ++c) {
      centers.row(c) = points.row(seeds[c]);
    }
    detail::LloydResult result = detail::lloyd(points, std::move(centers), cfg);
    if (result.wcss < best.wcss) best = std::move(result);
  }
  return ClusterLabels{std::move(best.labels)};
}

// Columns are the eigenvectors of the K smallest Laplacian eigenvalues
// (ascending), each sign-fixed so its largest-magnitude entry is positive.
inline Eigen::MatrixXd spectral_embedding(const LaplacianMatrix& l, int k) {
  const int n = l.size();
  if (k < 1 || k > n) {
    throw DimensionError("spectral embedding needs 1 <= K <= N, got K = " +
                         std::to_string(k) + ", N = " + std::to_string(n));
  }
  const EigenDecomposition eig = eigendecompose(l.entries);
  Eigen::MatrixXd embedding = eig.eigenvectors.leftCols(k);
  for (int c = 0; c < k; ++c) {
    Eigen::Index argmax = 0;
    embedding.col(c).cwiseAbs().maxCoeff(&argmax);
    if (embedding(argmax, c) < 0.0) embedding.col(c) = -embedding.col(c);
  }
  return embedding;
}

inline ClusterLabels spectral_clustering(const LaplacianMatrix& l, int k,
                                         const KMeansConfig& cfg) {
  KMeansConfig kcfg = cfg;
  kcfg.n_clusters = k;
  return kmeans(spectral_embedding(l, k), kcfg);
}

// K-means over the embedding rows; cfg.n_clusters is expected to match the
// embedding dimension when Z comes from the optimizer.
inline ClusterLabels cluster_embedding(const Embedding& z,
                                       const KMeansConfig& cfg) {
  return kmeans(z.matrix, cfg);
}

}  // namespace mlgc
