#pragma once

#include <Eigen/Dense>
#include <vector>

// Dense numerical primitives shared by the SIR estimators. All matrices are
// Eigen::MatrixXd in Eigen's default column-major layout; the library-wide
// convention keeps samples as columns (a p x n data matrix).
namespace lassosir::linalg {

/// Eigenvalues (nonincreasing) with matching unit-norm, mutually orthogonal
/// eigenvectors as columns.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Orthonormal basis of col(B) with numerically negligible directions
/// (singular values <= tol * largest) dropped. An all-zero B yields a
/// p x 0 matrix.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B, double tol = 1e-10);

/// Frobenius norm of P_A - P_B, the orthogonal projections onto the column
/// spans of A and B. Computed from orthonormal bases via
/// ||P_A - P_B||_F^2 = rank(A) + rank(B) - 2 ||Q_A^T Q_B||_F^2,
/// so the p x p projections are never formed.
double projection_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Top-k eigenpairs of F * F^T computed from the thin factor F (p x H),
/// so the p x p Gram matrix is never materialized. Eigenvalues are the
/// squared singular values of F. Throws std::invalid_argument when
/// k > min(p, H).
EigenPairs top_eigenpairs(const Eigen::MatrixXd& F, int k);

/// Exact 1-D 2-means: scans every split point of the sorted values and
/// minimizes total within-cluster sum of squares; returns the size of the
/// cluster with the larger center. All-equal input returns the full count
/// (no gap means every point is treated as signal). Ties between splits go
/// to the smaller high cluster.
int two_means_split(std::vector<double> values);

}  // namespace lassosir::linalg
