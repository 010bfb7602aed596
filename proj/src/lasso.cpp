#include "lassosir/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lassosir/errors.hpp"
#include "lassosir/rng.hpp"

namespace lassosir::lasso {

namespace {

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Gram matrices pay off once a whole path is fit per design; past this width
// the O(p^2 n) setup outweighs the cheaper passes.
constexpr int kGramWidthLimit = 300;

// Coordinate-descent state on a samples-as-rows design. Naive mode keeps the
// residual r = y - D beta; gram mode keeps the gradient g = (1/n) D^T r.
struct Descent {
    const Eigen::MatrixXd& D;      // n x p
    const Eigen::MatrixXd* G;      // (1/n) D^T D or nullptr
    int n, p;
    Eigen::VectorXd col_sq;        // (1/n) ||D col j||^2
    double yy_over_n = 0.0;
    Eigen::VectorXd xty_over_n;    // (1/n) D^T y (gram mode)

    Eigen::VectorXd beta;
    Eigen::VectorXd resid;         // naive mode
    Eigen::VectorXd grad;          // gram mode
    std::vector<int> support;      // sorted candidate set for support passes
    std::vector<char> in_support;
    Eigen::VectorXd scratch;       // gradient snapshot for verification

    Descent(const Eigen::MatrixXd& design, const Eigen::MatrixXd* gram)
        : D(design), G(gram),
          n(static_cast<int>(design.rows())), p(static_cast<int>(design.cols())) {
        if (G) {
            col_sq = G->diagonal();
        } else {
            col_sq = D.colwise().squaredNorm() / static_cast<double>(n);
        }
        in_support.assign(p, 0);
    }

    void reset(const Eigen::VectorXd& y, const Eigen::VectorXd* init) {
        yy_over_n = y.squaredNorm() / n;
        if (G) {
            // per-column dots, matching the naive-mode partials bit for bit
            xty_over_n.resize(p);
            for (int j = 0; j < p; ++j) xty_over_n(j) = D.col(j).dot(y) / n;
        }
        if (init) {
            beta = *init;
            if (G)
                grad = xty_over_n - (*G) * beta;
            else
                resid = y - D * beta;
        } else {
            beta = Eigen::VectorXd::Zero(p);
            if (G)
                grad = xty_over_n;
            else
                resid = y;
        }
        rebuild_support();
    }

    void rebuild_support() {
        support.clear();
        std::fill(in_support.begin(), in_support.end(), 0);
        for (int j = 0; j < p; ++j) {
            if (beta(j) != 0.0) {
                support.push_back(j);
                in_support[j] = 1;
            }
        }
    }

    double update_coordinate(int j, double mu) {
        const double a = col_sq(j);
        if (a <= 0.0) {
            const double delta = -beta(j);
            beta(j) = 0.0;
            return std::abs(delta);  // zero column never re-enters
        }
        const double partial =
            G ? grad(j) : D.col(j).dot(resid) / static_cast<double>(n);
        const double candidate = soft_threshold(partial + a * beta(j), mu) / a;
        const double delta = candidate - beta(j);
        if (delta != 0.0) {
            beta(j) = candidate;
            if (G)
                grad -= delta * G->col(j);
            else
                resid -= delta * D.col(j);
        }
        return std::abs(delta);
    }

    double full_pass(double mu) {
        double max_delta = 0.0;
        for (int j = 0; j < p; ++j)
            max_delta = std::max(max_delta, update_coordinate(j, mu));
        return max_delta;
    }

    double support_pass(double mu) {
        double max_delta = 0.0;
        for (int j : support)
            max_delta = std::max(max_delta, update_coordinate(j, mu));
        return max_delta;
    }

    // Snapshot check of the full convergence criterion: the gradient is
    // evaluated once (a single gemv in naive mode), and every coordinate's
    // prospective soft-threshold move is measured against tol. Coordinates
    // that would move are recruited into the support; no state changes here,
    // so the largest prospective move is exactly the criterion a cyclic pass
    // would have started with.
    double verify_and_recruit(double mu) {
        if (G) {
            scratch = grad;
        } else {
            scratch.noalias() = D.transpose() * resid;
            scratch /= static_cast<double>(n);
        }
        double max_delta = 0.0;
        bool recruited = false;
        for (int j = 0; j < p; ++j) {
            const double a = col_sq(j);
            double delta;
            if (a <= 0.0) {
                delta = std::abs(beta(j));  // zero column collapses to zero
            } else {
                const double candidate = soft_threshold(scratch(j) + a * beta(j), mu) / a;
                delta = std::abs(candidate - beta(j));
            }
            if (delta > max_delta) max_delta = delta;
            if (delta > 0.0 && !in_support[j]) {
                in_support[j] = 1;
                support.push_back(j);
                recruited = true;
            }
        }
        if (recruited) std::sort(support.begin(), support.end());
        return max_delta;
    }

    double objective(double mu) const {
        double rss_over_n;
        if (G)
            // g = c - G b  =>  b^T G b = b.c - b.g, so ||r||^2/n telescopes.
            rss_over_n = yy_over_n - beta.dot(xty_over_n) - beta.dot(grad);
        else
            rss_over_n = resid.squaredNorm() / n;
        return 0.5 * rss_over_n + mu * beta.lpNorm<1>();
    }

    // Cyclic order 1..p throughout. Cold starts take two full passes before
    // the support-only phase; warm starts go straight to it. Convergence is
    // declared only by a full verification pass whose largest coefficient
    // change is <= tol.
    void minimize(double mu, const SolveOptions& opts, bool warm, int& passes,
                  bool& converged, std::vector<double>* trace) {
        auto record = [&] {
            if (trace) trace->push_back(objective(mu));
        };
        converged = false;
        if (!warm) {
            for (int k = 0; k < 2; ++k) {
                const double d = full_pass(mu);
                ++passes;
                record();
                if (d <= opts.tol) {
                    converged = true;
                    return;
                }
                if (passes >= opts.max_passes) return;
            }
        }
        rebuild_support();
        while (passes < opts.max_passes) {
            while (passes < opts.max_passes) {
                const double d = support_pass(mu);
                ++passes;
                record();
                if (d <= opts.tol) break;
            }
            if (passes >= opts.max_passes) return;
            const double d = verify_and_recruit(mu);
            ++passes;
            record();
            if (d <= opts.tol) {
                converged = true;
                return;
            }
        }
    }
};

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double mu) {
    if (!X.allFinite() || !y.allFinite() || !std::isfinite(mu))
        throw std::invalid_argument("lasso: non-finite input");
    if (mu < 0.0) throw std::invalid_argument("lasso: mu must be nonnegative");
    if (X.cols() != y.size())
        throw std::invalid_argument("lasso: X and y sample counts differ");
}

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % bound;
}

std::vector<int> shuffled_indices(int n, std::uint64_t seed) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 gen(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(i) + 1));
        std::swap(idx[i], idx[j]);
    }
    return idx;
}

}  // namespace

LassoSolution solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double mu,
                    const Eigen::VectorXd* init, const SolveOptions& opts) {
    check_finite(X, y, mu);
    if (opts.tol <= 0.0) throw std::invalid_argument("lasso: tol must be positive");
    if (init && init->size() != X.rows())
        throw std::invalid_argument("lasso: init has wrong dimension");

    const Eigen::MatrixXd design = X.transpose();
    Descent descent(design, nullptr);
    const bool warm = init && init->squaredNorm() > 0.0;
    descent.reset(y, init);

    LassoSolution out;
    descent.minimize(mu, opts, warm, out.n_passes, out.converged, &out.objective_trace);
    out.beta = std::move(descent.beta);
    out.objective = out.objective_trace.empty()
                        ? 0.5 * descent.yy_over_n
                        : out.objective_trace.back();
    return out;
}

Eigen::VectorXd lambda_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            int n_grid, double ratio) {
    check_finite(X, y, 0.0);
    if (n_grid < 1) throw std::invalid_argument("lambda_path: n_grid must be >= 1");
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("lambda_path: ratio must lie in (0,1)");

    // Evaluated with the same per-column dot kernel the descent uses, so the
    // solution at mu_max is exactly zero (no one-ulp boundary crossings).
    const Eigen::MatrixXd design = X.transpose();
    const int n = static_cast<int>(design.rows());
    double mu_max = 0.0;
    for (int j = 0; j < design.cols(); ++j)
        mu_max = std::max(mu_max, std::abs(design.col(j).dot(y)) / n);
    if (mu_max <= 0.0)
        throw empty_path_error("lambda_path: response is orthogonal to every predictor");

    Eigen::VectorXd path(n_grid);
    if (n_grid == 1) {
        path(0) = mu_max;
        return path;
    }
    const double step = std::log(ratio) / (n_grid - 1);
    for (int k = 0; k < n_grid; ++k) path(k) = mu_max * std::exp(step * k);
    return path;
}

void fit_path(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
              const Eigen::MatrixXd* gram, const Eigen::VectorXd& path,
              const SolveOptions& opts,
              const std::function<void(int, const Eigen::VectorXd&)>& on_step) {
    Descent descent(design, gram);
    descent.reset(y, nullptr);
    for (int k = 0; k < path.size(); ++k) {
        int passes = 0;
        bool converged = false;
        descent.minimize(path(k), opts, /*warm=*/k > 0, passes, converged, nullptr);
        on_step(k, descent.beta);
    }
}

CvContext::CvContext(const Eigen::MatrixXd& X, int folds, std::uint64_t seed) {
    const int n = static_cast<int>(X.cols());
    p_ = static_cast<int>(X.rows());
    if (folds < 2 || folds > n)
        throw std::invalid_argument("cross_validate: need 2 <= folds <= n");

    const std::vector<int> order = shuffled_indices(n, seed);
    std::vector<int> sizes(folds, n / folds);
    for (int f = 0; f < n % folds; ++f) ++sizes[f];

    folds_.resize(folds);
    int pos = 0;
    for (int f = 0; f < folds; ++f) {
        Fold& fold = folds_[f];
        fold.test_index.assign(order.begin() + pos, order.begin() + pos + sizes[f]);
        pos += sizes[f];
        fold.train_index.reserve(n - sizes[f]);
        for (int g = 0; g < folds; ++g) {
            if (g == f) continue;
            int start = 0;
            for (int h = 0; h < g; ++h) start += sizes[h];
            fold.train_index.insert(fold.train_index.end(), order.begin() + start,
                                    order.begin() + start + sizes[g]);
        }
        const int n_train = static_cast<int>(fold.train_index.size());
        const int n_test = static_cast<int>(fold.test_index.size());
        fold.train_design.resize(n_train, p_);
        for (int i = 0; i < n_train; ++i)
            fold.train_design.row(i) = X.col(fold.train_index[i]).transpose();
        fold.test_design.resize(n_test, p_);
        for (int i = 0; i < n_test; ++i)
            fold.test_design.row(i) = X.col(fold.test_index[i]).transpose();
        if (p_ <= kGramWidthLimit)
            fold.gram = fold.train_design.transpose() * fold.train_design /
                        static_cast<double>(n_train);
    }
}

CrossValidation CvContext::run(const Eigen::VectorXd& y, const Eigen::VectorXd& path,
                               const SolveOptions& opts) const {
    if (path.size() == 0)
        throw std::invalid_argument("cross_validate: empty path");

    Eigen::VectorXd errors = Eigen::VectorXd::Zero(path.size());
    Eigen::VectorXd y_train, y_test, y_hat;
    for (const Fold& fold : folds_) {
        const int n_train = static_cast<int>(fold.train_index.size());
        const int n_test = static_cast<int>(fold.test_index.size());
        y_train.resize(n_train);
        for (int i = 0; i < n_train; ++i) y_train(i) = y(fold.train_index[i]);
        y_test.resize(n_test);
        for (int i = 0; i < n_test; ++i) y_test(i) = y(fold.test_index[i]);

        const Eigen::MatrixXd* gram = fold.gram.size() > 0 ? &fold.gram : nullptr;
        fit_path(fold.train_design, y_train, gram, path, opts,
                 [&](int k, const Eigen::VectorXd& beta) {
                     y_hat = y_test;
                     for (int j = 0; j < p_; ++j)
                         if (beta(j) != 0.0) y_hat -= beta(j) * fold.test_design.col(j);
                     errors(k) += y_hat.squaredNorm() / n_test;
                 });
    }
    errors /= static_cast<double>(folds_.size());

    CrossValidation out;
    out.cv_errors = errors;
    Eigen::Index best = 0;
    errors.minCoeff(&best);  // first minimum, i.e. the largest mu on ties
    out.index = static_cast<int>(best);
    out.mu_chosen = path(out.index);
    return out;
}

CrossValidation cross_validate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               int folds, const Eigen::VectorXd& path,
                               std::uint64_t seed) {
    check_finite(X, y, 0.0);
    return CvContext(X, folds, seed).run(y, path);
}

}  // namespace lassosir::lasso
