#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

// L1-penalized least squares,
//   minimize (1/2n) ||y - X^T beta||^2 + mu ||beta||_1,
// where X is p x n with samples as columns, solved by cyclic coordinate
// descent with exact soft-threshold updates. Includes the log-spaced
// regularization path and seeded K-fold cross-validation.
namespace lassosir::lasso {

struct SolveOptions {
    double tol = 1e-7;       // max coefficient change over a full pass
    int max_passes = 100000;
};

struct LassoSolution {
    Eigen::VectorXd beta;
    double objective = 0.0;
    int n_passes = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // objective after every pass
};

/// Cold starts at zero unless `init` is supplied. Throws
/// std::invalid_argument on non-finite input or mu < 0.
LassoSolution solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double mu,
                    const Eigen::VectorXd* init = nullptr,
                    const SolveOptions& opts = {});

/// Log-spaced grid of n_grid values from mu_max = ||(1/n) X y||_inf down to
/// ratio * mu_max. Throws empty_path_error when mu_max = 0.
Eigen::VectorXd lambda_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            int n_grid = 100, double ratio = 1e-3);

struct CrossValidation {
    double mu_chosen = 0.0;
    int index = 0;                // position of mu_chosen in the path
    Eigen::VectorXd cv_errors;    // mean held-out MSE per path value
};

/// Reusable K-fold split of a fixed design. Holding the per-fold training
/// designs (and, for small p, their Gram matrices) lets several responses
/// share one fold layout, which is how the estimators cross-validate every
/// pseudo-response direction against identical folds.
class CvContext {
public:
    /// Samples are assigned to folds by a seeded shuffle; fold sizes differ
    /// by at most one, remainder to the earliest folds.
    CvContext(const Eigen::MatrixXd& X, int folds, std::uint64_t seed);

    /// Warm-started path fit on every fold complement; returns the mu
    /// minimizing the mean held-out MSE (ties go to the larger mu).
    CrossValidation run(const Eigen::VectorXd& y, const Eigen::VectorXd& path,
                        const SolveOptions& opts = {}) const;

    int fold_count() const { return static_cast<int>(folds_.size()); }

private:
    struct Fold {
        std::vector<int> train_index;
        std::vector<int> test_index;
        Eigen::MatrixXd train_design;  // n_train x p, samples as rows
        Eigen::MatrixXd test_design;   // n_test x p
        Eigen::MatrixXd gram;          // (1/n_train) D^T D when small enough
    };
    std::vector<Fold> folds_;
    int p_ = 0;
};

/// One-shot convenience form of CvContext.
CrossValidation cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               int folds, const Eigen::VectorXd& path,
                               std::uint64_t seed);

/// Warm-started coordinate-descent sweep down a decreasing mu path on a
/// samples-as-rows design. `on_step(k, beta)` fires after each path value.
/// When `gram` is non-null it must equal (1/n) D^T D and updates run on the
/// gradient instead of the residual.
void fit_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
              const Eigen::MatrixXd* gram, const Eigen::VectorXd& path,
              const SolveOptions& opts,
              const std::function<void(int, const Eigen::VectorXd&)>& on_step);

}  // namespace lassosir::lasso
