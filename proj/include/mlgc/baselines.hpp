#pragma once

#include "mlgc/clustering.hpp"
#include "mlgc/graph.hpp"

namespace mlgc {

enum class BaselineMethod { ArithmeticMean };

// Entrywise mean of the per-layer Laplacians, summed in layer order. The set
// of valid Laplacians is convex, so the result is again a valid Laplacian.
inline LaplacianMatrix arithmetic_mean_laplacian(const MultilayerGraph& g) {
  const int n = g.n_vertices();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const LayerGraph& layer : g.layers()) {
    sum += build_laplacian(layer).entries;
  }
  return LaplacianMatrix{sum / g.n_layers()};
}

// Aggregation followed by spectral clustering of the single-layer result.
inline ClusterLabels baseline_cluster(const MultilayerGraph& g, int k,
                                      BaselineMethod method,
                                      const KMeansConfig& cfg) {
  switch (method) {
    case BaselineMethod::ArithmeticMean:
      return spectral_clustering(arithmetic_mean_laplacian(g), k, cfg);
  }
  throw ArgumentError("unknown baseline method");
}

}  // namespace mlgc
