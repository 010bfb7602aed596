#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lassosir/linalg.hpp"

// Slicing, slice means, the spectrum of the sliced covariance estimate
// Lambda_H = (1/H) X_H X_H^T, and the pseudo-response construction.
namespace lassosir::sir {

/// Slice assignment of samples. `assignment[j]` is the 0-based slice index
/// of sample j; `slice_sizes[h]` the number of samples in slice h.
/// `slice_means` (p x H, column h = mean of the centered samples assigned to
/// slice h) is filled by slice_means(); assign_slices leaves it empty.
struct SlicedDesign {
    std::vector<int> assignment;
    std::vector<int> slice_sizes;
    Eigen::MatrixXd slice_means;
};

/// Top eigenvalues and orthonormal eigenvectors of Lambda_H.
struct SirSpectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// Subtract each row's sample mean; returns the centered copy.
Eigen::MatrixXd center_samples(const Eigen::MatrixXd& X);

/// Continuous mode: samples ordered by y (stable, original index breaks
/// ties); the first n mod H slices receive ceil(n/H) samples, the rest
/// floor(n/H). Discrete mode: slice h collects all samples at the h-th
/// smallest distinct response level, and `slices` must equal the number of
/// levels.
SlicedDesign assign_slices(const Eigen::VectorXd& y, int slices, bool discrete = false);

/// p x H matrix whose column h averages the centered sample columns
/// assigned to slice h.
Eigen::MatrixXd slice_means(const Eigen::MatrixXd& X_centered, const SlicedDesign& design);

/// Top-k eigenpairs of Lambda_H = (1/H) X_H X_H^T via the thin factor
/// X_H / sqrt(H).
SirSpectrum sir_spectrum(const Eigen::MatrixXd& X_H, int k);

/// Pseudo-response matrix Y~ (n x k). For sample j in slice h and direction
/// i: Y~(j,i) = n / (H c_h lambda_i) * (xbar_h . eta_i), which reduces to
/// (1/(c lambda)) M M^T X^T eta when all slices share size c and preserves
/// the defining identity (1/n) X Y~_i = eta_i for unequal sizes as well.
/// Requires design.slice_means to be populated. Directions with
/// lambda_i <= eps_lambda raise degenerate_spectrum_error.
Eigen::MatrixXd pseudo_response(const SlicedDesign& design, const SirSpectrum& spectrum,
                                double eps_lambda = 1e-12);

}  // namespace lassosir::sir
