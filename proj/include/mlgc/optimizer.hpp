#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlgc/errors.hpp"
#include "mlgc/graph.hpp"
#include "mlgc/objective.hpp"
#include "mlgc/rng.hpp"

namespace mlgc {

struct OptimizerConfig {
  int max_iters = 500;
  double init_step = 0.1;  // first-iteration trial step, also the ceiling
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  double tol_rel_obj = 1e-7;
  std::uint64_t seed = 0;
};

struct IterationRecord {
  double objective;
  double gradient_norm;  // tangent-projected gradient at the previous iterate
  double step_size;      // accepted step; 0 for the initial record
  double constraint_violation;
};

struct TrainTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  bool step_failure = false;  // line search exhausted away from a stationary point
  int degenerate_spectrum_events = 0;
};

// Maps an arbitrary full-column-rank N x K matrix onto the constraint set
// {Z : Z^T Z = (1/N) I} via thin QR: Z = Q / sqrt(N), with the signs of Q's
// columns fixed so that R has a positive diagonal. Idempotent and invariant
// to positive column scaling of the input.
inline Embedding retract(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index k = m.cols();
  if (k > n) {
    throw RankError("cannot retract a matrix with more columns than rows (" +
                    std::to_string(n) + "x" + std::to_string(k) + ")");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  double max_diag = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    max_diag = std::max(max_diag, std::abs(packed(c, c)));
  }
  const double rank_tol = 1e-12 * std::max(1.0, max_diag);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double r = packed(c, c);
    if (std::abs(r) <= rank_tol) {
      throw RankError("rank-deficient input to retraction: |R(" +
                      std::to_string(c) + "," + std::to_string(c) +
                      ")| = " + std::to_string(std::abs(r)));
    }
    if (r < 0.0) q.col(c) = -q.col(c);
  }
  return Embedding{q / std::sqrt(static_cast<double>(n))};
}

// Orthogonal projection of an ambient gradient onto the tangent space of
// {Z : Z^T Z = (1/N) I} at z. The normal space is {Z S : S symmetric}, so
// the projection removes N * Z * sym(Z^T g).
inline Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& z,
                                       const Eigen::MatrixXd& g) {
  const double n = static_cast<double>(z.rows());
  const Eigen::MatrixXd ztg = z.transpose() * g;
  return g - n * z * (0.5 * (ztg + ztg.transpose()));
}

// Standard-normal N x K matrix retracted onto the constraint set;
// deterministic for a fixed seed.
inline Embedding initialize_embedding(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1 || k > n) {
    throw DimensionError("initialization needs 1 <= K <= N, got K = " +
                         std::to_string(k) + ", N = " + std::to_string(n));
  }
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd m(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = normal_sample(rng);
  return retract(m);
}

// Projected gradient descent on the constraint manifold: the Euclidean
// gradient is projected onto the tangent space, a step is taken along the
// negative projection, and the QR retraction maps back; steps are accepted
// via Armijo backtracking on the retracted point. The raw Euclidean
// gradient is unusable as a search direction here: its normal component
// (which the retraction immediately annihilates) dominates the tangential
// one by orders of magnitude on this objective, so the sufficient-decrease
// test measured against the full gradient norm cannot be met and the line
// search collapses.
//
// Each iteration's trial step starts at four times the previously accepted
// step, capped at init_step. Stops when the relative objective change drops
// below tol_rel_obj or after max_iters iterations. When the line search
// exhausts its 50 halvings, the run counts as converged if the first-trial
// objective already agrees with the current one to tolerance (descent has
// stalled at a stationary point); otherwise the step_failure flag is set
// and the best iterate so far is returned.
inline std::pair<Embedding, TrainTrace> optimize(const MultilayerGraph& g,
                                                 const ObjectiveConfig& obj_cfg,
                                                 const OptimizerConfig& opt_cfg) {
  constexpr int kMaxHalvings = 50;
  Embedding z = initialize_embedding(g.n_vertices(), obj_cfg.n_clusters,
                                     opt_cfg.seed);
  double f = total_objective(z, g, obj_cfg);
  TrainTrace trace;
  trace.records.push_back({f, 0.0, 0.0, constraint_violation(z)});

  double last_step = opt_cfg.init_step;
  for (int iter = 0; iter < opt_cfg.max_iters; ++iter) {
    GradientDiagnostics diag;
    const Eigen::MatrixXd grad =
        tangent_project(z.matrix, objective_gradient(z, g, obj_cfg, &diag));
    if (diag.degenerate_spectrum) ++trace.degenerate_spectrum_events;
    const double grad_norm2 = grad.squaredNorm();

    double step = std::min(opt_cfg.init_step, 4.0 * last_step);
    double f_first_trial = 0.0;
    bool accepted = false;
    Embedding candidate;
    double f_candidate = 0.0;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      candidate = retract(z.matrix - step * grad);
      f_candidate = total_objective(candidate, g, obj_cfg);
      if (halving == 0) f_first_trial = f_candidate;
      if (f_candidate <= f - opt_cfg.armijo_c * step * grad_norm2) {
        accepted = true;
        break;
      }
      step *= opt_cfg.backtrack_factor;
    }
    if (!accepted) {
      if (std::abs(f_first_trial - f) <=
          opt_cfg.tol_rel_obj * std::max(1.0, std::abs(f))) {
        trace.converged = true;
      } else {
        trace.step_failure = true;
      }
      break;
    }

    const double rel_change =
        std::abs(f - f_candidate) / std::max(1.0, std::abs(f));
    z = std::move(candidate);
    f = f_candidate;
    last_step = step;
    trace.records.push_back(
        {f, std::sqrt(grad_norm2), step, constraint_violation(z)});
    if (rel_change < opt_cfg.tol_rel_obj) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(z), std::move(trace)};
}

namespace detail {

// Central finite differences of an arbitrary matrix functional.
template <typename F>
Eigen::MatrixXd central_difference(F&& f, const Eigen::MatrixXd& at,
                                   double h) {
  Eigen::MatrixXd grad(at.rows(), at.cols());
  Eigen::MatrixXd point = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      point(i, j) = at(i, j) + h;
      const double f_plus = f(point);
      point(i, j) = at(i, j) - h;
      const double f_minus = f(point);
      point(i, j) = at(i, j);
      grad(i, j) = (f_plus - f_minus) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace detail

// Entry-by-entry central differences of total_objective, taken off-manifold
// to match the Euclidean gradient's definition. Test oracle for
// objective_gradient.
inline Eigen::MatrixXd finite_difference_gradient(const Embedding& z,
                                                  const MultilayerGraph& g,
                                                  const ObjectiveConfig& cfg,
                                                  double h = 1e-5) {
  if (h < 1e-7 || h > 1e-3) {
    throw ArgumentError("finite-difference step must lie in [1e-7, 1e-3]");
  }
  return detail::central_difference(
      [&](const Eigen::MatrixXd& m) {
        return total_objective(Embedding{m}, g, cfg);
      },
      z.matrix, h);
}

}  // namespace mlgc
