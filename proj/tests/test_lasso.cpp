#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lassosir/errors.hpp"
#include "lassosir/lasso.hpp"
#include "lassosir/rng.hpp"

using namespace lassosir;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(int rows, int cols, std::mt19937_64& gen) {
    MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = rng::standard_normal(gen);
    return M;
}

VectorXd random_vector(int n, std::mt19937_64& gen) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng::standard_normal(gen);
    return v;
}

double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

}  // namespace

TEST_CASE("solve returns exact zero at and above mu_max") {
    std::mt19937_64 gen(3);
    const MatrixXd X = random_matrix(5, 30, gen);
    const VectorXd y = random_vector(30, gen);
    const double mu_max = (X * y).lpNorm<Eigen::Infinity>() / 30.0;

    const auto at = lasso::solve(X, y, mu_max);
    CHECK(at.beta.isZero(0));
    CHECK(at.converged);
    const auto above = lasso::solve(X, y, 2.0 * mu_max);
    CHECK(above.beta.isZero(0));
}

TEST_CASE("solve matches the closed form on orthonormal designs") {
    // (1/n) X X^T = I with (1/n) X y = (1, 0)
    MatrixXd X(2, 4);
    X << 1, 1, 1, 1, 1, -1, 1, -1;
    VectorXd y(4);
    y << 1, 1, 1, 1;
    const auto sol = lasso::solve(X, y, 0.3);
    CHECK(sol.beta(0) == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(sol.beta(1) == doctest::Approx(0.0));

    // random orthonormal-case check across coordinates
    std::mt19937_64 gen(5);
    VectorXd yr = random_vector(4, gen);
    const double mu = 0.2;
    const auto sr = lasso::solve(X, yr, mu, nullptr, {1e-12, 100000});
    const VectorXd z = X * yr / 4.0;
    for (int j = 0; j < 2; ++j)
        CHECK(sr.beta(j) == doctest::Approx(soft(z(j), mu)).epsilon(1e-8));
}

TEST_CASE("solve at mu = 0 matches the normal equations") {
    std::mt19937_64 gen(7);
    const MatrixXd X = random_matrix(3, 10, gen);
    const VectorXd y = random_vector(10, gen);
    const auto sol = lasso::solve(X, y, 0.0, nullptr, {1e-11, 200000});
    const VectorXd direct = (X * X.transpose()).ldlt().solve(X * y);
    CHECK((sol.beta - direct).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("solve rejects bad input") {
    MatrixXd X(2, 3);
    X << 1, 2, 3, 4, 5, 6;
    VectorXd y(3);
    y << 1, 2, 3;
    X(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lasso::solve(X, y, 0.1), std::invalid_argument);
    X(0, 0) = 1;
    CHECK_THROWS_AS(lasso::solve(X, y, -0.1), std::invalid_argument);
    VectorXd bad = y;
    bad(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(lasso::solve(X, bad, 0.1), std::invalid_argument);
}

TEST_CASE("objective is nonincreasing across passes") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 5 + static_cast<int>(gen() % 40);
        const int n = 10 + static_cast<int>(gen() % 80);
        const MatrixXd X = random_matrix(p, n, gen);
        const VectorXd y = random_vector(n, gen);
        const double mu_max = (X * y).lpNorm<Eigen::Infinity>() / n;
        const auto sol = lasso::solve(X, y, 0.05 * mu_max);
        for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
            CHECK(sol.objective_trace[i] <=
                  sol.objective_trace[i - 1] + 1e-12 * std::abs(sol.objective_trace[i - 1]));
        CHECK(sol.converged);
    }
}

TEST_CASE("KKT certificate on random problems") {
    std::mt19937_64 gen(13);
    const double tol = 1e-7;
    for (int trial = 0; trial < 25; ++trial) {
        const int p = 5 + static_cast<int>(gen() % 196);   // up to ~200
        const int n = 20 + static_cast<int>(gen() % 481);  // up to ~500
        const MatrixXd X = random_matrix(p, n, gen);
        VectorXd beta_true = VectorXd::Zero(p);
        for (int j = 0; j < std::min(p, 5); ++j) beta_true(j) = rng::standard_normal(gen);
        const VectorXd y = X.transpose() * beta_true + random_vector(n, gen);

        const double mu_max = (X * y).lpNorm<Eigen::Infinity>() / n;
        const double mu = 0.2 * mu_max;
        const auto sol = lasso::solve(X, y, mu, nullptr, {tol, 100000});
        REQUIRE(sol.converged);

        const VectorXd g = X * (y - X.transpose() * sol.beta) / n;
        for (int j = 0; j < p; ++j) {
            if (sol.beta(j) == 0.0) {
                CHECK(std::abs(g(j)) <= mu + 10 * tol);
            } else {
                CHECK(std::abs(g(j) - mu * (sol.beta(j) > 0 ? 1.0 : -1.0)) <= 10 * tol);
            }
        }
    }
}

TEST_CASE("lambda_path endpoints and shape") {
    MatrixXd X(1, 2);
    X << 1, 1;
    VectorXd y(2);
    y << 1, 1;
    const VectorXd path = lasso::lambda_path(X, y, 100, 1e-3);
    CHECK(path(0) == doctest::Approx(1.0));  // mu_max = |(1/2)(1+1)| = 1
    CHECK(path(99) == doctest::Approx(1e-3).epsilon(1e-10));
    for (int k = 0; k + 1 < 100; ++k) CHECK(path(k) > path(k + 1));

    CHECK_THROWS_AS(lasso::lambda_path(X, VectorXd::Zero(2)), empty_path_error);
    CHECK(lasso::lambda_path(X, y, 1, 0.5).size() == 1);
}

TEST_CASE("path continuity and support growth under warm starts") {
    std::mt19937_64 gen(19);
    const int p = 30, n = 100;
    const MatrixXd X = random_matrix(p, n, gen);
    VectorXd beta_true = VectorXd::Zero(p);
    beta_true.head(4).setConstant(2.0);
    const VectorXd y = X.transpose() * beta_true + random_vector(n, gen);

    const VectorXd path = lasso::lambda_path(X, y, 50, 1e-3);
    std::vector<VectorXd> betas;
    lasso::fit_path(X.transpose(), y, nullptr, path, {},
                    [&](int, const VectorXd& b) { betas.push_back(b); });
    REQUIRE(betas.size() == 50);
    CHECK(betas.front().isZero(0));  // homotopy endpoint at mu_max
    const int support_first = (betas.front().array() != 0.0).count();
    const int support_last = (betas.back().array() != 0.0).count();
    CHECK(support_last > support_first);
    const double final_norm = betas.back().norm();
    for (std::size_t k = 1; k < betas.size(); ++k)
        CHECK((betas[k] - betas[k - 1]).norm() <= 0.5 * (final_norm + 1.0));
}

TEST_CASE("gram and naive modes agree along a path") {
    std::mt19937_64 gen(23);
    const int p = 20, n = 60;
    const MatrixXd X = random_matrix(p, n, gen);
    const VectorXd y = random_vector(n, gen);
    const MatrixXd D = X.transpose();
    const MatrixXd G = D.transpose() * D / static_cast<double>(n);
    const VectorXd path = lasso::lambda_path(X, y, 20, 1e-2);

    std::vector<VectorXd> naive, gram;
    lasso::fit_path(D, y, nullptr, path, {1e-9, 100000},
                    [&](int, const VectorXd& b) { naive.push_back(b); });
    lasso::fit_path(D, y, &G, path, {1e-9, 100000},
                    [&](int, const VectorXd& b) { gram.push_back(b); });
    for (std::size_t k = 0; k < naive.size(); ++k)
        CHECK((naive[k] - gram[k]).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("cross_validate is deterministic and matches a hand-run oracle") {
    std::mt19937_64 gen(29);
    const int p = 2, n = 8;
    const MatrixXd X = random_matrix(p, n, gen);
    VectorXd beta_true(2);
    beta_true << 1.5, 0.0;
    const VectorXd y = X.transpose() * beta_true + 0.1 * random_vector(n, gen);

    const VectorXd path = lasso::lambda_path(X, y, 12, 1e-2);
    const auto cv1 = lasso::cross_validate(X, y, 2, path, 77);
    const auto cv2 = lasso::cross_validate(X, y, 2, path, 77);
    CHECK(cv1.mu_chosen == cv2.mu_chosen);
    CHECK((cv1.cv_errors - cv2.cv_errors).norm() == 0.0);

    // single-element path short-circuits to that mu
    const auto single = lasso::cross_validate(X, y, 2, path.head(1), 77);
    CHECK(single.mu_chosen == path(0));

    // hand-executed folds: rebuild the documented split (contiguous blocks
    // of the seeded shuffle), fit each training complement with the public
    // solver, average held-out MSE
    Eigen::VectorXd manual = Eigen::VectorXd::Zero(path.size());
    {
        // recompute the shuffle exactly as documented
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 g2(77);
        auto uniform_below = [&](std::uint64_t bound) {
            const std::uint64_t lim =
                std::numeric_limits<std::uint64_t>::max() -
                std::numeric_limits<std::uint64_t>::max() % bound;
            std::uint64_t x;
            do {
                x = g2();
            } while (x >= lim);
            return x % bound;
        };
        for (int i = n - 1; i > 0; --i)
            std::swap(idx[i], idx[uniform_below(static_cast<std::uint64_t>(i) + 1)]);

        for (int fold = 0; fold < 2; ++fold) {
            std::vector<int> test(idx.begin() + fold * 4, idx.begin() + fold * 4 + 4);
            std::vector<int> train;
            for (int i = 0; i < n; ++i)
                if (std::find(test.begin(), test.end(), i) == test.end())
                    train.push_back(i);
            // order training samples as the context does: remaining blocks in order
            std::vector<int> ordered;
            for (int g3 = 0; g3 < 2; ++g3) {
                if (g3 == fold) continue;
                ordered.insert(ordered.end(), idx.begin() + g3 * 4, idx.begin() + g3 * 4 + 4);
            }
            MatrixXd Xtr(p, 4), Xte(p, 4);
            VectorXd ytr(4), yte(4);
            for (int i = 0; i < 4; ++i) {
                Xtr.col(i) = X.col(ordered[i]);
                ytr(i) = y(ordered[i]);
                Xte.col(i) = X.col(test[i]);
                yte(i) = y(test[i]);
            }
            VectorXd warm = VectorXd::Zero(p);
            for (int k = 0; k < path.size(); ++k) {
                const auto fitted = lasso::solve(Xtr, ytr, path(k), &warm, {1e-10, 200000});
                warm = fitted.beta;
                manual(k) += (yte - Xte.transpose() * fitted.beta).squaredNorm() / 4.0;
            }
        }
        manual /= 2.0;
    }
    for (int k = 0; k < path.size(); ++k)
        CHECK(cv1.cv_errors(k) == doctest::Approx(manual(k)).epsilon(1e-5));

    CHECK_THROWS_AS(lasso::cross_validate(X, y, 1, path, 77), std::invalid_argument);
    CHECK_THROWS_AS(lasso::cross_validate(X, y, 2, VectorXd(), 77), std::invalid_argument);
}
