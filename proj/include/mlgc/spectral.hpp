#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>
#include <string>

#include "mlgc/errors.hpp"
#include "mlgc/graph.hpp"

namespace mlgc {

// Eigenvalues in ascending order with the matching orthonormal eigenvectors
// as columns.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

// Dense symmetric eigendecomposition. The input is symmetrized as
// (M + M^T)/2 before solving, so callers only need symmetry up to roundoff.
inline EigenDecomposition eigendecompose(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("eigendecompose needs a square matrix, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge on a " << m.rows() << "x"
        << m.cols() << " matrix (|M|_F = " << sym.norm()
        << ", max |entry| = " << sym.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

// An eigenvalue of a Laplacian counts as zero when <= 1e-8 * max(1, lambda_max).
inline double zero_eigenvalue_threshold(const Eigen::VectorXd& eigenvalues) {
  const double lambda_max =
      eigenvalues.size() > 0 ? eigenvalues(eigenvalues.size() - 1) : 0.0;
  return 1e-8 * std::max(1.0, lambda_max);
}

// Moore-Penrose pseudoinverse of a connected-graph Laplacian via the
// rank-one shift (L + 11^T/N)^{-1} - 11^T/N. The shift only repairs the
// all-ones nullspace, so any disconnected graph is rejected.
inline Eigen::MatrixXd laplacian_pseudoinverse(const LaplacianMatrix& l) {
  const int n = l.size();
  const EigenDecomposition eig = eigendecompose(l.entries);
  if (n >= 2 && eig.eigenvalues(1) <= zero_eigenvalue_threshold(eig.eigenvalues)) {
    std::ostringstream msg;
    msg << "laplacian is numerically singular: second-smallest eigenvalue "
        << eig.eigenvalues(1) << " indicates a disconnected graph";
    throw SingularityError(msg.str());
  }
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd shifted = l.entries + j;
  Eigen::MatrixXd inverse =
      shifted.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
  inverse = 0.5 * (inverse + inverse.transpose());  // solve drift
  return inverse - j;
}

// Effective resistance between two distinct vertices of a connected graph:
// (delta_i - delta_j)^T L^dagger (delta_i - delta_j).
inline double effective_resistance(const LaplacianMatrix& l, int i, int j) {
  const int n = l.size();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw ArgumentError("vertex index out of range: (" + std::to_string(i) +
                        "," + std::to_string(j) + ") with n = " +
                        std::to_string(n));
  }
  if (i == j) {
    throw ArgumentError("effective resistance needs two distinct vertices");
  }
  const Eigen::MatrixXd pinv = laplacian_pseudoinverse(l);
  return pinv(i, i) + pinv(j, j) - 2.0 * pinv(i, j);
}

// Total effective resistance N * sum_{n>=2} 1/lambda_n. Equals the sum of
// pairwise resistances and N * Tr(L^dagger) for connected graphs.
inline double total_effective_resistance(const LaplacianMatrix& l) {
  const int n = l.size();
  const EigenDecomposition eig = eigendecompose(l.entries);
  if (n >= 2 && eig.eigenvalues(1) < 1e-12) {
    std::ostringstream msg;
    msg << "graph is effectively disconnected: second-smallest eigenvalue "
        << eig.eigenvalues(1) << " is below 1e-12";
    throw SingularityError(msg.str());
  }
  double total = 0.0;
  for (int k = 1; k < n; ++k) total += 1.0 / eig.eigenvalues(k);
  return n * total;
}

}  // namespace mlgc
