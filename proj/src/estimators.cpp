#include "lassosir/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "lassosir/errors.hpp"
#include "lassosir/lasso.hpp"
#include "lassosir/linalg.hpp"
#include "lassosir/rng.hpp"

namespace lassosir::estimators {

namespace {

constexpr std::uint64_t kFoldStream = 0x466f6c64;   // CV fold assignment
constexpr std::uint64_t kMatrixStream = 0x4d4c6173; // matrix-lasso folds

struct Prepared {
    Eigen::MatrixXd Xc;        // centered, p x n
    sir::SlicedDesign design;  // with slice_means populated
    int slices = 0;
    int n = 0, p = 0;
};

Prepared prepare(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int slices,
                 bool discrete) {
    if (!X.allFinite() || !y.allFinite())
        throw std::invalid_argument("estimator: non-finite input");
    if (X.cols() != y.size())
        throw std::invalid_argument("estimator: X and y sample counts differ");

    Prepared prep;
    prep.n = static_cast<int>(X.cols());
    prep.p = static_cast<int>(X.rows());
    if (discrete) {
        std::set<double> levels(y.begin(), y.end());
        prep.slices = static_cast<int>(levels.size());
        if (prep.slices < 2)
            throw std::invalid_argument("estimator: discrete response has fewer than 2 levels");
    } else {
        if (slices < 2) throw std::invalid_argument("estimator: need at least 2 slices");
        prep.slices = slices;
    }
    prep.Xc = sir::center_samples(X);
    prep.design = sir::assign_slices(y, prep.slices, discrete);
    prep.design.slice_means = sir::slice_means(prep.Xc, prep.design);
    return prep;
}

// Per-direction Lasso fits against a shared fold partition; the final
// coefficient comes from a warm-started full-data path truncated at the
// chosen penalty. Directions at or below eps_lambda either throw or are
// skipped with beta = 0 depending on skip_degenerate.
struct DirectionFits {
    Eigen::MatrixXd B;            // p x k
    std::vector<double> mu_used;  // k
};

DirectionFits fit_directions(const Prepared& prep, const sir::SirSpectrum& spectrum,
                             const FitOptions& opts, bool skip_degenerate) {
    const int k = static_cast<int>(spectrum.eigenvalues.size());
    DirectionFits fits;
    fits.B = Eigen::MatrixXd::Zero(prep.p, k);
    fits.mu_used.assign(k, 0.0);
    if (k == 0) return fits;

    std::vector<int> live;
    for (int i = 0; i < k; ++i) {
        if (spectrum.eigenvalues(i) > opts.eps_lambda) {
            live.push_back(i);
        } else if (!skip_degenerate) {
            throw degenerate_spectrum_error(
                "lasso_sir: direction " + std::to_string(i + 1) +
                " has eigenvalue <= eps_lambda; it carries no sliced variance");
        }
    }
    if (live.empty()) return fits;

    sir::SirSpectrum live_spectrum;
    live_spectrum.eigenvalues.resize(live.size());
    live_spectrum.eigenvectors.resize(prep.p, live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
        live_spectrum.eigenvalues(i) = spectrum.eigenvalues(live[i]);
        live_spectrum.eigenvectors.col(i) = spectrum.eigenvectors.col(live[i]);
    }
    const Eigen::MatrixXd pseudo =
        sir::pseudo_response(prep.design, live_spectrum, opts.eps_lambda);

    const lasso::SolveOptions solve_opts;
    if (opts.mu_theory_c) {
        for (std::size_t i = 0; i < live.size(); ++i) {
            const double mu = *opts.mu_theory_c *
                              std::sqrt(std::log(static_cast<double>(prep.p)) /
                                        (prep.n * live_spectrum.eigenvalues(i)));
            const lasso::LassoSolution sol =
                lasso::solve(prep.Xc, pseudo.col(i), mu, nullptr, solve_opts);
            fits.B.col(live[i]) = sol.beta;
            fits.mu_used[live[i]] = mu;
        }
        return fits;
    }

    const lasso::CvContext cv(prep.Xc, opts.cv_folds,
                              rng::derive_seed(opts.seed, kFoldStream));
    const Eigen::MatrixXd full_design = prep.Xc.transpose();
    Eigen::MatrixXd full_gram;
    if (prep.p <= 300)
        full_gram = full_design.transpose() * full_design / static_cast<double>(prep.n);
    const Eigen::MatrixXd* gram = full_gram.size() > 0 ? &full_gram : nullptr;

    for (std::size_t i = 0; i < live.size(); ++i) {
        const Eigen::VectorXd response = pseudo.col(i);
        const Eigen::VectorXd path =
            lasso::lambda_path(prep.Xc, response, opts.path_grid, opts.path_ratio);
        const lasso::CrossValidation choice = cv.run(response, path, solve_opts);
        lasso::fit_path(full_design, response, gram, path.head(choice.index + 1),
                        solve_opts, [&](int step, const Eigen::VectorXd& beta) {
                            if (step == choice.index) fits.B.col(live[i]) = beta;
                        });
        fits.mu_used[live[i]] = choice.mu_chosen;
    }
    return fits;
}

Eigen::VectorXd adjusted_eigenvalues(const Eigen::VectorXd& eigenvalues,
                                     const Eigen::MatrixXd& B) {
    Eigen::VectorXd adj(eigenvalues.size());
    for (int i = 0; i < eigenvalues.size(); ++i)
        adj(i) = eigenvalues(i) * B.col(i).norm();
    return adj;
}

CentralSpaceEstimate assemble(Eigen::MatrixXd B, const Eigen::VectorXd& eigenvalues,
                              std::vector<double> mu_used) {
    CentralSpaceEstimate est;
    est.adjusted_eigenvalues = adjusted_eigenvalues(eigenvalues, B);
    est.basis = linalg::orthonormal_basis(B);
    est.B_hat = std::move(B);
    est.d_used = static_cast<int>(est.B_hat.cols());
    est.mu_used = std::move(mu_used);
    return est;
}

int resolved_directions(const Prepared& prep, const FitOptions& opts) {
    if (opts.directions) {
        if (*opts.directions < 1)
            throw std::invalid_argument("estimator: directions must be >= 1");
        return *opts.directions;
    }
    if (opts.discrete) return prep.slices - 1;  // the slicing convention for levels
    return -1;  // estimate
}

}  // namespace

DirectionScan scan_directions(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const FitOptions& opts) {
    const Prepared prep = prepare(X, y, opts.slices, opts.discrete);
    const int k = std::min(prep.p, prep.slices);
    const sir::SirSpectrum spectrum = sir::sir_spectrum(prep.design.slice_means, k);
    DirectionFits fits = fit_directions(prep, spectrum, opts, /*skip_degenerate=*/true);

    DirectionScan scan;
    scan.B_full = std::move(fits.B);
    scan.eigenvalues = spectrum.eigenvalues;
    scan.mu_used = std::move(fits.mu_used);
    scan.adjusted_eigenvalues = Eigen::VectorXd::Zero(prep.slices);
    scan.adjusted_eigenvalues.head(k) = adjusted_eigenvalues(spectrum.eigenvalues, scan.B_full);

    std::vector<double> values(scan.adjusted_eigenvalues.begin(),
                               scan.adjusted_eigenvalues.end());
    scan.d_hat = std::min(linalg::two_means_split(std::move(values)), k);
    return scan;
}

int estimate_d(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitOptions& opts) {
    FitOptions scan_opts = opts;
    scan_opts.directions.reset();
    return scan_directions(X, y, scan_opts).d_hat;
}

CentralSpaceEstimate lasso_sir(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const FitOptions& opts) {
    const Prepared prep = prepare(X, y, opts.slices, opts.discrete);
    const int d = resolved_directions(prep, opts);

    if (d < 0) {
        // Estimated d: the scan already fit every direction with the same
        // per-direction seeds, so its leading columns are the estimate.
        const DirectionScan scan = scan_directions(X, y, opts);
        const int d_hat = scan.d_hat;
        std::vector<double> mu(scan.mu_used.begin(), scan.mu_used.begin() + d_hat);
        return assemble(scan.B_full.leftCols(d_hat), scan.eigenvalues.head(d_hat),
                        std::move(mu));
    }

    if (d > std::min(prep.p, prep.slices))
        throw std::invalid_argument("lasso_sir: directions exceed min(p, slices)");
    const sir::SirSpectrum spectrum = sir::sir_spectrum(prep.design.slice_means, d);
    DirectionFits fits = fit_directions(prep, spectrum, opts, /*skip_degenerate=*/false);
    return assemble(std::move(fits.B), spectrum.eigenvalues, std::move(fits.mu_used));
}

CentralSpaceEstimate dt_sir(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int slices,
                            int d, std::optional<int> screen_size, bool discrete) {
    const Prepared prep = prepare(X, y, slices, discrete);
    if (d < 1) throw std::invalid_argument("dt_sir: d must be >= 1");

    int keep;
    if (screen_size) {
        if (*screen_size < 1 || *screen_size >= prep.n)
            throw std::invalid_argument("dt_sir: screen_size must satisfy 1 <= size < n");
        keep = std::min(*screen_size, prep.p);
    } else {
        keep = static_cast<int>(prep.n / (4.0 * std::log(static_cast<double>(prep.n))));
        keep = std::min(prep.p, std::max(keep, d));
    }
    if (d > std::min(keep, prep.slices))
        throw std::invalid_argument("dt_sir: d exceeds min(screen_size, slices)");

    // diag(Lambda_H) without forming the p x p matrix: squared row norms of
    // X_H / sqrt(H).
    const Eigen::VectorXd diag =
        prep.design.slice_means.rowwise().squaredNorm() / static_cast<double>(prep.slices);
    std::vector<int> order(prep.p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return diag(a) > diag(b); });
    std::vector<int> retained(order.begin(), order.begin() + keep);
    std::sort(retained.begin(), retained.end());

    Eigen::MatrixXd means_I(keep, prep.slices);
    Eigen::MatrixXd X_I(keep, prep.n);
    for (int i = 0; i < keep; ++i) {
        means_I.row(i) = prep.design.slice_means.row(retained[i]);
        X_I.row(i) = prep.Xc.row(retained[i]);
    }

    const sir::SirSpectrum reduced = sir::sir_spectrum(means_I, d);
    Eigen::MatrixXd sigma_I = X_I * X_I.transpose() / static_cast<double>(prep.n);

    Eigen::LLT<Eigen::MatrixXd> llt(sigma_I);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-8 * sigma_I.trace() / keep;
        sigma_I.diagonal().array() += ridge;
        llt.compute(sigma_I);
        if (llt.info() != Eigen::Success)
            throw singular_covariance_error(
                "dt_sir: reduced covariance is singular even after ridging");
    }
    const Eigen::MatrixXd B_I = llt.solve(reduced.eigenvectors);

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(prep.p, d);
    for (int i = 0; i < keep; ++i) B.row(retained[i]) = B_I.row(i);
    return assemble(std::move(B), reduced.eigenvalues, {});
}

Eigen::VectorXd matrix_lasso_direction(const Eigen::MatrixXd& A, const Eigen::VectorXd& eta,
                                       double mu) {
    const int p = static_cast<int>(A.rows());
    if ((A * eta).lpNorm<Eigen::Infinity>() == 0.0) return Eigen::VectorXd::Zero(p);
    // ||A b - eta||^2 + mu ||b||_1 is the standard objective with p
    // pseudo-samples (rows of A) once mu is divided by 2p.
    return lasso::solve(A, eta, mu / (2.0 * p)).beta;
}

CentralSpaceEstimate matrix_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  int slices, int d, int cv_folds, std::uint64_t seed,
                                  bool discrete) {
    const Prepared prep = prepare(X, y, slices, discrete);
    if (d < 1 || d > std::min(prep.p, prep.slices))
        throw std::invalid_argument("matrix_lasso: d must lie in [1, min(p, slices)]");

    const sir::SirSpectrum spectrum = sir::sir_spectrum(prep.design.slice_means, d);
    const Eigen::MatrixXd A = prep.Xc * prep.Xc.transpose() / static_cast<double>(prep.n);

    const lasso::SolveOptions solve_opts;
    const lasso::CvContext cv(A, cv_folds, rng::derive_seed(seed, kMatrixStream));
    Eigen::MatrixXd full_gram;
    if (prep.p <= 300) full_gram = A.transpose() * A / static_cast<double>(prep.p);
    const Eigen::MatrixXd* gram = full_gram.size() > 0 ? &full_gram : nullptr;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(prep.p, d);
    std::vector<double> mu_used(d, 0.0);
    for (int i = 0; i < d; ++i) {
        const Eigen::VectorXd eta = spectrum.eigenvectors.col(i);
        if ((A * eta).lpNorm<Eigen::Infinity>() == 0.0) continue;  // eta in null(A)
        const Eigen::VectorXd path = lasso::lambda_path(A, eta, 100, 1e-3);
        const lasso::CrossValidation choice = cv.run(eta, path, solve_opts);
        lasso::fit_path(A, eta, gram, path.head(choice.index + 1), solve_opts,
                        [&](int step, const Eigen::VectorXd& beta) {
                            if (step == choice.index) B.col(i) = beta;
                        });
        mu_used[i] = 2.0 * prep.p * choice.mu_chosen;  // report on the Eq.-(4) scale
    }
    return assemble(std::move(B), spectrum.eigenvalues, std::move(mu_used));
}

}  // namespace lassosir::estimators
