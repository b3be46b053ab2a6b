#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "mlgc/errors.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/spectral.hpp"

namespace mlgc {

// N x K node embedding; row i is the vector of vertex i. The constraint
// Z^T Z = (1/N) I is maintained by the optimizer's retraction and can be
// measured with constraint_violation(); nothing here assumes it.
struct Embedding {
  Eigen::MatrixXd matrix;
  int n_vertices() const { return static_cast<int>(matrix.rows()); }
  int dim() const { return static_cast<int>(matrix.cols()); }
};

inline double constraint_violation(const Embedding& z) {
  const int n = z.n_vertices();
  const int k = z.dim();
  return (z.matrix.transpose() * z.matrix -
          Eigen::MatrixXd::Identity(k, k) / n)
      .norm();
}

struct ObjectiveConfig {
  double gamma1 = 0.1;    // weight of the resistance regularizer
  double gamma2 = 100.0;  // weight of the community regularizer
  int n_clusters = 2;
  double eig_floor = 1e-8;  // guards 1/lambda against near-zero eigenvalues
};

// Pairwise embedding similarities; symmetric, diagonal 1/2, off-diagonal in
// (0, 1/2] except for overflow-guarded exact zeros.
struct SimilarityMatrix {
  Eigen::MatrixXd entries;
};

// 1 / (1 + exp(|a - b|^2)). Decreasing in the squared distance, equal to 1/2
// at distance zero. For squared distances above 700 the exp would overflow
// and the value is an exact 0.
template <typename DerivedA, typename DerivedB>
double similarity(const Eigen::MatrixBase<DerivedA>& a,
                  const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("similarity needs equal-length vectors, got " +
                         std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  const double d2 = (a - b).squaredNorm();
  if (d2 > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(d2));
}

inline SimilarityMatrix induced_similarity_matrix(const Embedding& z) {
  const int n = z.n_vertices();
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 0.5;
    for (int j = i + 1; j < n; ++j) {
      const double value = similarity(z.matrix.row(i), z.matrix.row(j));
      s(i, j) = value;
      s(j, i) = value;
    }
  }
  return SimilarityMatrix{std::move(s)};
}

namespace detail {

// Laplacian whose edge weights are the strict upper triangle of a similarity
// matrix; the diagonal is ignored.
inline LaplacianMatrix laplacian_from_similarities(const Eigen::MatrixXd& s) {
  const int n = static_cast<int>(s.rows());
  Eigen::VectorXd upper(static_cast<Eigen::Index>(n) * (n - 1) / 2);
  Eigen::Index idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) upper(idx++) = s(i, j);
  return laplacian_from_upper_weights(upper, n);
}

// Contrastive loss of one layer given precomputed similarities. Vertices
// without neighbors contribute nothing.
inline double contrastive_loss_from_similarities(const Eigen::MatrixXd& s,
                                                 const LayerGraph& g) {
  const int n = static_cast<int>(s.rows());
  const Eigen::MatrixXd& w = g.adjacency();
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    if ((w.row(i).array() > 0.0).count() == 0) continue;
    double denom = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k != i) denom += std::exp(s(i, k));
    }
    const double log_denom = std::log(denom);
    for (int j = 0; j < n; ++j) {
      if (w(i, j) > 0.0) loss += log_denom - s(i, j);
    }
  }
  return loss;
}

// gamma1 * sum_{n>K} 1/max(lambda_n, floor) + gamma2 * sum_{n<=K} lambda_n^2
// over ascending eigenvalues (1-based n).
inline double spectral_penalty(const Eigen::VectorXd& eigenvalues, int k,
                               double gamma1, double gamma2, double floor) {
  const int n = static_cast<int>(eigenvalues.size());
  double penalty = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i < k) {
      penalty += gamma2 * eigenvalues(i) * eigenvalues(i);
    } else {
      penalty += gamma1 / std::max(eigenvalues(i), floor);
    }
  }
  return penalty;
}

}  // namespace detail

// Representative single-layer graph of the embedding: the operator that maps
// the strict upper triangle of the similarity matrix into a valid Laplacian.
inline LaplacianMatrix induced_laplacian(const Embedding& z) {
  return detail::laplacian_from_similarities(
      induced_similarity_matrix(z).entries);
}

// Softmax contrastive loss of one layer,
//   sum_i sum_{j in N(i)} -log( exp(SIM_ij) / sum_{k != i} exp(SIM_ik) ),
// where N(i) is the set of positive-weight neighbors of i. The denominator
// runs over every k != i; edge weights only decide membership in N(i).
// Isolated vertices contribute no terms.
inline double contrastive_loss(const Embedding& z, const LayerGraph& g) {
  if (z.n_vertices() != g.n_vertices()) {
    throw DimensionError("embedding has " + std::to_string(z.n_vertices()) +
                         " rows but the graph has " +
                         std::to_string(g.n_vertices()) + " vertices");
  }
  return detail::contrastive_loss_from_similarities(
      induced_similarity_matrix(z).entries, g);
}

// sum_{n=K+1}^{N} 1/max(lambda_n, eig_floor), ascending eigenvalues.
// Proportional to the total effective resistance when no eigenvalue is
// floored.
inline double effective_resistance_regularizer(const LaplacianMatrix& l,
                                               int k, double eig_floor) {
  const int n = l.size();
  if (k < 0 || k + 1 > n) {
    throw DimensionError("resistance regularizer needs K+1 <= N, got K = " +
                         std::to_string(k) + ", N = " + std::to_string(n));
  }
  const EigenDecomposition eig = eigendecompose(l.entries);
  double sum = 0.0;
  for (int i = k; i < n; ++i) sum += 1.0 / std::max(eig.eigenvalues(i), eig_floor);
  return sum;
}

// sum_{n=1}^{K} lambda_n^2, ascending eigenvalues; zero exactly when the
// graph has at least K connected components.
inline double community_regularizer(const LaplacianMatrix& l, int k) {
  const int n = l.size();
  if (k < 0 || k > n) {
    throw DimensionError("community regularizer needs K <= N, got K = " +
                         std::to_string(k) + ", N = " + std::to_string(n));
  }
  const EigenDecomposition eig = eigendecompose(l.entries);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += eig.eigenvalues(i) * eig.eigenvalues(i);
  return sum;
}

// Full objective: per-layer contrastive losses plus the two spectral
// regularizers of the induced Laplacian.
inline double total_objective(const Embedding& z, const MultilayerGraph& g,
                              const ObjectiveConfig& cfg) {
  const int n = z.n_vertices();
  if (n != g.n_vertices()) {
    throw DimensionError("embedding has " + std::to_string(n) +
                         " rows but the graph has " +
                         std::to_string(g.n_vertices()) + " vertices");
  }
  if (cfg.n_clusters < 1 || cfg.n_clusters >= n) {
    throw DimensionError("objective needs 1 <= K < N, got K = " +
                         std::to_string(cfg.n_clusters) + ", N = " +
                         std::to_string(n));
  }
  const SimilarityMatrix sims = induced_similarity_matrix(z);
  double value = 0.0;
  for (const LayerGraph& layer : g.layers()) {
    value += detail::contrastive_loss_from_similarities(sims.entries, layer);
  }
  const LaplacianMatrix l = detail::laplacian_from_similarities(sims.entries);
  const EigenDecomposition eig = eigendecompose(l.entries);
  value += detail::spectral_penalty(eig.eigenvalues, cfg.n_clusters,
                                    cfg.gamma1, cfg.gamma2, cfg.eig_floor);
  return value;
}

struct GradientDiagnostics {
  // The eigenvalues at the K/K+1 boundary of the induced Laplacian are
  // closer than 1e-9, so the spectral term is at a nondifferentiable point
  // and the returned gradient is a subgradient choice.
  bool degenerate_spectrum = false;
  double boundary_gap = std::numeric_limits<double>::infinity();
};

// Euclidean gradient of total_objective with respect to Z.
//
// Every term depends on Z only through the pairwise similarities
// sigma_ij = SIM(z_i, z_j), so the gradient is assembled as
//   dF/dZ = sum_{i<j} (dF/dsigma_ij) * sigma'(d2_ij) * d(d2_ij)/dZ
// with sigma'(d2) = -sigma(1-sigma). The contrastive part contributes the
// softmax residual n_i * p_ik - [k in N(i)] per ordered pair; the spectral
// part differentiates eigenvalues through dlambda_n/dL = u_n u_n^T and maps
// the Laplacian assembly onto pairs as M_ii + M_jj - 2 M_ij.
inline Eigen::MatrixXd objective_gradient(const Embedding& z,
                                          const MultilayerGraph& g,
                                          const ObjectiveConfig& cfg,
                                          GradientDiagnostics* diag = nullptr) {
  const int n = z.n_vertices();
  const int k = cfg.n_clusters;
  if (n != g.n_vertices()) {
    throw DimensionError("embedding has " + std::to_string(n) +
                         " rows but the graph has " +
                         std::to_string(g.n_vertices()) + " vertices");
  }
  if (k < 1 || k >= n) {
    throw DimensionError("objective needs 1 <= K < N, got K = " +
                         std::to_string(k) + ", N = " + std::to_string(n));
  }
  const Eigen::MatrixXd s = induced_similarity_matrix(z).entries;

  // dF/dsigma over ordered pairs, contrastive part.
  Eigen::MatrixXd dsig = Eigen::MatrixXd::Zero(n, n);
  for (const LayerGraph& layer : g.layers()) {
    const Eigen::MatrixXd& w = layer.adjacency();
    for (int i = 0; i < n; ++i) {
      int n_neighbors = 0;
      double denom = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (w(i, j) > 0.0) ++n_neighbors;
        denom += std::exp(s(i, j));
      }
      if (n_neighbors == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        dsig(i, j) += n_neighbors * std::exp(s(i, j)) / denom -
                      (w(i, j) > 0.0 ? 1.0 : 0.0);
      }
    }
  }

  // Spectral part: M = sum_n (dh/dlambda_n) u_n u_n^T.
  const LaplacianMatrix l = detail::laplacian_from_similarities(s);
  const EigenDecomposition eig = eigendecompose(l.entries);
  if (diag != nullptr) {
    diag->boundary_gap = eig.eigenvalues(k) - eig.eigenvalues(k - 1);
    diag->degenerate_spectrum = diag->boundary_gap <= 1e-9;
  }
  Eigen::VectorXd eigen_weights(n);
  for (int i = 0; i < n; ++i) {
    if (i < k) {
      eigen_weights(i) = 2.0 * cfg.gamma2 * eig.eigenvalues(i);
    } else if (eig.eigenvalues(i) > cfg.eig_floor) {
      eigen_weights(i) =
          -cfg.gamma1 / (eig.eigenvalues(i) * eig.eigenvalues(i));
    } else {
      eigen_weights(i) = 0.0;  // the floor is active, 1/max(.,eps) is flat
    }
  }
  const Eigen::MatrixXd m = eig.eigenvectors *
                            eigen_weights.asDiagonal() *
                            eig.eigenvectors.transpose();

  // Fold ordered contributions into unordered pairs and chain through
  // sigma'(d2); raising sigma_ij moves L_ij, L_ji down and L_ii, L_jj up.
  Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double total = dsig(i, j) + dsig(j, i) +
                           m(i, i) + m(j, j) - 2.0 * m(i, j);
      const double sigma_prime = -s(i, j) * (1.0 - s(i, j));
      const double c = 2.0 * total * sigma_prime;
      coeff(i, j) = c;
      coeff(j, i) = c;
    }
  }
  // grad_i = sum_j coeff_ij (z_i - z_j)
  return coeff.rowwise().sum().asDiagonal() * z.matrix - coeff * z.matrix;
}

}  // namespace mlgc
