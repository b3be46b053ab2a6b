#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mlgc/clustering.hpp"
#include "mlgc/errors.hpp"

namespace mlgc {

// Cross-tabulation of two labelings: counts(a, b) is the number of items
// with predicted cluster a and true cluster b. The two labelings may use
// different numbers of clusters.
struct ContingencyTable {
  Eigen::MatrixXi counts;
  Eigen::VectorXi row_totals;
  Eigen::VectorXi col_totals;
  long long total = 0;

  static ContingencyTable from_counts(Eigen::MatrixXi c) {
    ContingencyTable t;
    t.row_totals = c.rowwise().sum();
    t.col_totals = c.colwise().sum().transpose();
    t.total = c.sum();
    t.counts = std::move(c);
    return t;
  }
};

inline ContingencyTable contingency(const ClusterLabels& pred,
                                    const ClusterLabels& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("contingency needs equal-length labelings, got " +
                         std::to_string(pred.size()) + " and " +
                         std::to_string(truth.size()));
  }
  const int kp = std::max(pred.n_clusters(), 1);
  const int kt = std::max(truth.n_clusters(), 1);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(kp, kt);
  for (int i = 0; i < pred.size(); ++i) {
    ++counts(pred.ids[i], truth.ids[i]);
  }
  return ContingencyTable::from_counts(std::move(counts));
}

namespace detail {

// Hungarian algorithm (potentials formulation) for the square min-cost
// assignment problem; returns the column matched to each row.
inline std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

inline double binom2(long long x) { return 0.5 * x * (x - 1); }

}  // namespace detail

// Fraction of items matched under the best injective mapping between
// predicted and true cluster ids (Hungarian assignment on the contingency
// table, zero-padded to square when the cluster counts differ).
inline double accuracy(const ContingencyTable& t) {
  if (t.total == 0) return 1.0;
  const int m = static_cast<int>(
      std::max(t.counts.rows(), t.counts.cols()));
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(m, m);
  cost.topLeftCorner(t.counts.rows(), t.counts.cols()) =
      -t.counts.cast<double>();
  const std::vector<int> assignment = detail::min_cost_assignment(cost);
  double matched = 0.0;
  for (int a = 0; a < t.counts.rows(); ++a) {
    const int b = assignment[a];
    if (b < t.counts.cols()) matched += t.counts(a, b);
  }
  return matched / static_cast<double>(t.total);
}

// (1/N) * sum over predicted clusters of their largest true-class count.
inline double purity(const ContingencyTable& t) {
  if (t.total == 0) return 1.0;
  long long matched = 0;
  for (Eigen::Index a = 0; a < t.counts.rows(); ++a) {
    matched += t.counts.row(a).maxCoeff();
  }
  return static_cast<double>(matched) / static_cast<double>(t.total);
}

// Mutual information normalized by the geometric mean of the two label
// entropies (natural logs). 1 when both entropies vanish, 0 when exactly
// one does.
inline double nmi(const ContingencyTable& t) {
  if (t.total == 0) return 1.0;
  const double n = static_cast<double>(t.total);
  double h_pred = 0.0, h_true = 0.0, mutual = 0.0;
  for (Eigen::Index a = 0; a < t.row_totals.size(); ++a) {
    if (t.row_totals(a) > 0) {
      const double p = t.row_totals(a) / n;
      h_pred -= p * std::log(p);
    }
  }
  for (Eigen::Index b = 0; b < t.col_totals.size(); ++b) {
    if (t.col_totals(b) > 0) {
      const double p = t.col_totals(b) / n;
      h_true -= p * std::log(p);
    }
  }
  for (Eigen::Index a = 0; a < t.counts.rows(); ++a) {
    for (Eigen::Index b = 0; b < t.counts.cols(); ++b) {
      const long long c = t.counts(a, b);
      if (c == 0) continue;
      // the ratio is computed from exact integer products so independent
      // labelings give log(1) = 0 exactly
      const double ratio =
          (static_cast<double>(c) * n) /
          (static_cast<double>(t.row_totals(a)) * t.col_totals(b));
      mutual += (c / n) * std::log(ratio);
    }
  }
  if (h_pred == 0.0 && h_true == 0.0) return 1.0;
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;
  return std::clamp(mutual / std::sqrt(h_pred * h_true), 0.0, 1.0);
}

// Chance-corrected pair-counting agreement,
//   (sum_ab C(n_ab,2) - E) / (M - E)
// with E the expected index under random labelings with the same marginals
// and M the mean of the two marginal pair counts. 1 for the degenerate 0/0
// case (both partitions trivial in the pair sense).
inline double adjusted_rand_index(const ContingencyTable& t) {
  const double pairs_total = detail::binom2(t.total);
  if (pairs_total == 0.0) return 1.0;
  double index = 0.0, pairs_pred = 0.0, pairs_true = 0.0;
  for (Eigen::Index a = 0; a < t.counts.rows(); ++a) {
    for (Eigen::Index b = 0; b < t.counts.cols(); ++b) {
      index += detail::binom2(t.counts(a, b));
    }
  }
  for (Eigen::Index a = 0; a < t.row_totals.size(); ++a) {
    pairs_pred += detail::binom2(t.row_totals(a));
  }
  for (Eigen::Index b = 0; b < t.col_totals.size(); ++b) {
    pairs_true += detail::binom2(t.col_totals(b));
  }
  const double expected = pairs_pred * pairs_true / pairs_total;
  const double max_index = 0.5 * (pairs_pred + pairs_true);
  if (max_index - expected == 0.0) return 1.0;
  return (index - expected) / (max_index - expected);
}

struct Scores {
  double accuracy = 0.0;
  double purity = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

inline Scores score(const ClusterLabels& pred, const ClusterLabels& truth) {
  const ContingencyTable t = contingency(pred, truth);
  return Scores{accuracy(t), purity(t), nmi(t), adjusted_rand_index(t)};
}

}  // namespace mlgc
