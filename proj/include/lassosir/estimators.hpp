#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "lassosir/sir.hpp"

// The four estimation procedures: Lasso-SIR (single and multiple index),
// direction-count estimation by the adjusted-eigenvalue split, DT-SIR, and
// the Matrix Lasso benchmark.
namespace lassosir::estimators {

struct CentralSpaceEstimate {
    Eigen::MatrixXd B_hat;                 // p x d stacked direction estimates
    Eigen::MatrixXd basis;                 // p x r orthonormal, r <= d
    Eigen::VectorXd adjusted_eigenvalues;  // lambda_i * ||beta_i||_2
    int d_used = 0;
    std::vector<double> mu_used;           // per-direction penalty (empty for DT-SIR)
};

struct FitOptions {
    int slices = 20;                  // H; ignored in discrete mode (level count rules)
    std::optional<int> directions;    // d; estimated via the direction scan when absent
    bool discrete = false;            // slice by distinct response levels, d defaults to H-1
    int cv_folds = 10;
    std::uint64_t seed = 0;
    std::optional<double> mu_theory_c;  // mu_i = C sqrt(log p / (n lambda_i)) instead of CV
    int path_grid = 100;
    double path_ratio = 1e-3;
    double eps_lambda = 1e-12;
};

/// Full sweep with d = H: every eigen-direction of Lambda_H gets a Lasso
/// fit (directions below eps_lambda are skipped with beta = 0), producing
/// the adjusted eigenvalues whose 2-means split estimates d.
struct DirectionScan {
    Eigen::VectorXd adjusted_eigenvalues;  // H entries, zero-padded past rank
    Eigen::MatrixXd B_full;                // p x k, k = min(p, H)
    Eigen::VectorXd eigenvalues;           // k
    std::vector<double> mu_used;           // k
    int d_hat = 0;
};

/// Pipeline: center -> slice -> slice means -> spectrum -> pseudo-response
/// -> per-direction Lasso with CV-chosen penalty. Deterministic given
/// opts.seed. Throws degenerate_spectrum_error when a requested direction
/// carries no sliced variance.
CentralSpaceEstimate lasso_sir(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const FitOptions& opts);

DirectionScan scan_directions(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const FitOptions& opts);

/// Number of directions from the adjusted-eigenvalue 2-means split.
int estimate_d(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const FitOptions& opts);

/// Diagonal-thresholding SIR: screen predictors by diag(Lambda_H), run SIR
/// on the retained set (solving Sigma_I B_I = eta_I with a ridge fallback),
/// embed with zeros. screen_size defaults to min(p, floor(n / (4 log n))).
CentralSpaceEstimate dt_sir(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int slices,
                            int d, std::optional<int> screen_size = std::nullopt,
                            bool discrete = false);

/// Penalized solve of ||(1/n) X X^T beta - eta_i||^2 + mu_i ||beta||_1 per
/// top eigenvector, with mu_i cross-validated over an analogous path.
/// Reported mu values are on that objective's scale.
CentralSpaceEstimate matrix_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  int slices, int d, int cv_folds, std::uint64_t seed,
                                  bool discrete = false);

/// Single Matrix-Lasso direction on a prebuilt quadratic form A = (1/n)XX^T;
/// mu on the ||A b - eta||^2 + mu ||b||_1 scale. A zero gradient A eta gives
/// beta = 0.
Eigen::VectorXd matrix_lasso_direction(const Eigen::MatrixXd& A, const Eigen::VectorXd& eta,
                                       double mu);

}  // namespace lassosir::estimators
