#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mlgc/errors.hpp"

namespace mlgc {

// One weighted undirected layer over N vertices. The adjacency matrix is
// symmetric with nonnegative weights and a zero diagonal.
class LayerGraph {
 public:
  static LayerGraph from_adjacency(Eigen::MatrixXd w, double tol = 1e-12) {
    if (w.rows() != w.cols()) {
      throw DimensionError("adjacency matrix must be square, got " +
                           std::to_string(w.rows()) + "x" +
                           std::to_string(w.cols()));
    }
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      if (std::abs(w(i, i)) > tol) {
        throw DomainError("adjacency diagonal must be zero at vertex " +
                          std::to_string(i));
      }
      w(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
        if (std::abs(w(i, j) - w(j, i)) > tol) {
          throw DomainError("adjacency must be symmetric, mismatch at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (w(i, j) < 0.0) {
          throw DomainError("edge weights must be nonnegative, w(" +
                            std::to_string(i) + "," + std::to_string(j) +
                            ") = " + std::to_string(w(i, j)));
        }
        w(j, i) = w(i, j);
      }
    }
    return LayerGraph(std::move(w));
  }

  // Undirected edges (i, j, weight); each edge may be listed once.
  static LayerGraph from_edges(
      int n_vertices, const std::vector<std::tuple<int, int, double>>& edges) {
    if (n_vertices < 1) throw DimensionError("graph needs at least 1 vertex");
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_vertices, n_vertices);
    for (const auto& [i, j, weight] : edges) {
      if (i < 0 || j < 0 || i >= n_vertices || j >= n_vertices) {
        throw DimensionError("edge endpoint out of range: (" +
                             std::to_string(i) + "," + std::to_string(j) +
                             ") with n = " + std::to_string(n_vertices));
      }
      if (i == j) {
        throw DomainError("self-loop at vertex " + std::to_string(i));
      }
      if (weight < 0.0) {
        throw DomainError("negative edge weight " + std::to_string(weight));
      }
      w(i, j) = weight;
      w(j, i) = weight;
    }
    return LayerGraph(std::move(w));
  }

  int n_vertices() const { return static_cast<int>(adjacency_.rows()); }
  const Eigen::MatrixXd& adjacency() const { return adjacency_; }

 private:
  explicit LayerGraph(Eigen::MatrixXd w) : adjacency_(std::move(w)) {}
  Eigen::MatrixXd adjacency_;
};

// S >= 1 layers over a shared vertex set.
class MultilayerGraph {
 public:
  explicit MultilayerGraph(std::vector<LayerGraph> layers)
      : layers_(std::move(layers)) {
    if (layers_.empty()) {
      throw DimensionError("multilayer graph needs at least one layer");
    }
    const int n = layers_.front().n_vertices();
    for (const auto& layer : layers_) {
      if (layer.n_vertices() != n) {
        throw DimensionError("all layers must share the vertex set: got " +
                             std::to_string(layer.n_vertices()) + " and " +
                             std::to_string(n) + " vertices");
      }
    }
  }

  int n_vertices() const { return layers_.front().n_vertices(); }
  int n_layers() const { return static_cast<int>(layers_.size()); }
  const LayerGraph& layer(int s) const { return layers_.at(s); }
  const std::vector<LayerGraph>& layers() const { return layers_; }

 private:
  std::vector<LayerGraph> layers_;
};

// Combinatorial graph Laplacian: symmetric, nonpositive off-diagonal,
// zero row sums.
struct LaplacianMatrix {
  Eigen::MatrixXd entries;
  int size() const { return static_cast<int>(entries.rows()); }
};

// Weighted vertex degrees d_i = sum_j w_ij.
inline Eigen::VectorXd degrees(const LayerGraph& g) {
  return g.adjacency().rowwise().sum();
}

// L = D - W.
inline LaplacianMatrix build_laplacian(const LayerGraph& g) {
  Eigen::MatrixXd l = -g.adjacency();
  l.diagonal() = degrees(g);
  return LaplacianMatrix{std::move(l)};
}

// True iff m is symmetric with nonpositive off-diagonal and zero row sums,
// all within tol.
inline bool validate_laplacian(const Eigen::MatrixXd& m, double tol = 1e-8) {
  if (m.rows() != m.cols()) {
    throw DimensionError("laplacian must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
      if (m(i, j) > tol) return false;
    }
  }
  return (m.rowwise().sum().array().abs() <= tol).all();
}

// Assembles a Laplacian from strict-upper-triangle edge weights listed
// row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline LaplacianMatrix laplacian_from_upper_weights(const Eigen::VectorXd& w,
                                                    int n) {
  if (n < 1) throw DimensionError("laplacian needs at least 1 vertex");
  const Eigen::Index expected =
      static_cast<Eigen::Index>(n) * (n - 1) / 2;
  if (w.size() != expected) {
    throw DimensionError("expected " + std::to_string(expected) +
                         " upper-triangle weights for n = " +
                         std::to_string(n) + ", got " +
                         std::to_string(w.size()));
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++idx) {
      const double weight = w(idx);
      if (weight < 0.0) {
        throw DomainError("negative weight " + std::to_string(weight) +
                          " at upper-triangle position " +
                          std::to_string(idx));
      }
      l(i, j) = -weight;
      l(j, i) = -weight;
      l(i, i) += weight;
      l(j, j) += weight;
    }
  }
  return LaplacianMatrix{std::move(l)};
}

}  // namespace mlgc
