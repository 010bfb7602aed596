#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lassosir/linalg.hpp"
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

// brute-force: build both projections explicitly
double projection_distance_dense(const MatrixXd& A, const MatrixXd& B) {
    const MatrixXd qa = linalg::orthonormal_basis(A);
    const MatrixXd qb = linalg::orthonormal_basis(B);
    const MatrixXd pa = qa * qa.transpose();
    const MatrixXd pb = qb * qb.transpose();
    return (pa - pb).norm();
}

// exhaustive 2-partition search; returns minimal total within-SS
double best_two_partition_ss(const std::vector<double>& values) {
    const int m = static_cast<int>(values.size());
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < (1 << m) - 1; ++mask) {
        double sa = 0, sb = 0, na = 0, nb = 0;
        for (int i = 0; i < m; ++i)
            (mask >> i & 1) ? (sa += values[i], ++na) : (sb += values[i], ++nb);
        const double ma = sa / na, mb = sb / nb;
        double ss = 0;
        for (int i = 0; i < m; ++i) {
            const double d = values[i] - ((mask >> i & 1) ? ma : mb);
            ss += d * d;
        }
        best = std::min(best, ss);
    }
    return best;
}

double split_ss(std::vector<double> values, int high_count) {
    std::sort(values.begin(), values.end());
    const int m = static_cast<int>(values.size());
    const int k = m - high_count;
    double sa = 0, sb = 0;
    for (int i = 0; i < k; ++i) sa += values[i];
    for (int i = k; i < m; ++i) sb += values[i];
    const double ma = sa / k, mb = sb / high_count;
    double ss = 0;
    for (int i = 0; i < k; ++i) ss += (values[i] - ma) * (values[i] - ma);
    for (int i = k; i < m; ++i) ss += (values[i] - mb) * (values[i] - mb);
    return ss;
}

}  // namespace

TEST_CASE("orthonormal_basis on simple spans") {
    MatrixXd B(3, 2);
    B << 1, 0, 0, 1, 0, 0;
    const MatrixXd Q = linalg::orthonormal_basis(B);
    CHECK(Q.cols() == 2);
    CHECK((Q.transpose() * Q - MatrixXd::Identity(2, 2)).norm() < 1e-12);
    CHECK(linalg::projection_distance(Q, B) < 1e-12);

    MatrixXd scaled(3, 1);
    scaled << 2, 0, 0;
    const MatrixXd Qs = linalg::orthonormal_basis(scaled);
    CHECK(Qs.cols() == 1);
    CHECK(std::abs(std::abs(Qs(0, 0)) - 1.0) < 1e-12);

    MatrixXd deficient(3, 2);
    deficient << 1, 2, 0, 0, 0, 0;
    CHECK(linalg::orthonormal_basis(deficient).cols() == 1);

    CHECK(linalg::orthonormal_basis(MatrixXd::Zero(4, 2)).cols() == 0);
}

TEST_CASE("projection_distance on known pairs") {
    MatrixXd e1(2, 1), e2(2, 1), diag(2, 1);
    e1 << 1, 0;
    e2 << 0, 1;
    diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(linalg::projection_distance(e1, e1) == doctest::Approx(0.0));
    CHECK(linalg::projection_distance(e1, e2) == doctest::Approx(std::sqrt(2.0)));
    // P_diag = [[.5,.5],[.5,.5]]; Frobenius norm of the difference is 1
    CHECK(linalg::projection_distance(e1, diag) == doctest::Approx(1.0));
}

TEST_CASE("projection_distance properties on random bases") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 2 + static_cast<int>(gen() % 19);
        const int d1 = 1 + static_cast<int>(gen() % std::min(4, p));
        const int d2 = 1 + static_cast<int>(gen() % std::min(4, p));
        const MatrixXd A = random_matrix(p, d1, gen);
        const MatrixXd B = random_matrix(p, d2, gen);

        const double dist = linalg::projection_distance(A, B);
        CHECK(dist >= 0.0);
        CHECK(dist <= std::sqrt(static_cast<double>(d1 + d2)) + 1e-9);
        CHECK(dist == doctest::Approx(linalg::projection_distance(B, A)).epsilon(1e-10));
        CHECK(dist == doctest::Approx(projection_distance_dense(A, B)).epsilon(1e-8));

        // basis invariance under invertible recombination
        MatrixXd R = random_matrix(d1, d1, gen);
        while (std::abs(R.determinant()) < 1e-3) R = random_matrix(d1, d1, gen);
        CHECK(linalg::projection_distance(A, A * R) < 1e-8);
        CHECK(linalg::projection_distance(A, A) < 1e-10);
    }
}

TEST_CASE("top_eigenpairs diagonal and zero cases") {
    MatrixXd F(2, 2);
    F << 2, 0, 0, 1;
    const auto pairs = linalg::top_eigenpairs(F, 2);
    CHECK(pairs.values(0) == doctest::Approx(4.0));
    CHECK(pairs.values(1) == doctest::Approx(1.0));
    CHECK(std::abs(pairs.vectors.col(0)(0)) == doctest::Approx(1.0));
    CHECK(std::abs(pairs.vectors.col(1)(1)) == doctest::Approx(1.0));

    const auto zero = linalg::top_eigenpairs(MatrixXd::Zero(3, 2), 1);
    CHECK(zero.values(0) == doctest::Approx(0.0));
    CHECK(zero.vectors.col(0).norm() == doctest::Approx(1.0));

    CHECK_THROWS_AS(linalg::top_eigenpairs(F, 3), std::invalid_argument);
}

TEST_CASE("top_eigenpairs matches dense eigendecomposition") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(gen() % 6);
        const int h = 2 + static_cast<int>(gen() % 4);
        const int k = std::min(p, h);
        const MatrixXd F = random_matrix(p, h, gen);
        const auto pairs = linalg::top_eigenpairs(F, k);

        Eigen::SelfAdjointEigenSolver<MatrixXd> dense(F * F.transpose());
        const VectorXd all = dense.eigenvalues().reverse();
        for (int i = 0; i < k; ++i) {
            CHECK(pairs.values(i) == doctest::Approx(all(i)).epsilon(1e-8));
            // residual check against the Gram matrix itself
            const double resid =
                (F * (F.transpose() * pairs.vectors.col(i)) -
                 pairs.values(i) * pairs.vectors.col(i))
                    .norm();
            CHECK(resid <= 1e-8 * std::max(1.0, pairs.values(0)));
        }
        // nonincreasing values, orthonormal vectors, trace bound
        for (int i = 0; i + 1 < k; ++i) CHECK(pairs.values(i) >= pairs.values(i + 1));
        CHECK((pairs.vectors.transpose() * pairs.vectors - MatrixXd::Identity(k, k)).norm() <
              1e-8);
        CHECK(pairs.values.sum() <= (F * F.transpose()).trace() + 1e-8);
        // eigenvalues are the squared singular values
        Eigen::JacobiSVD<MatrixXd> svd(F);
        for (int i = 0; i < k; ++i)
            CHECK(pairs.values(i) ==
                  doctest::Approx(svd.singularValues()(i) * svd.singularValues()(i))
                      .epsilon(1e-10));
    }
}

TEST_CASE("two_means_split on fixed examples") {
    CHECK(linalg::two_means_split({5.0, 4.8, 0.1, 0.2, 0.15}) == 2);
    CHECK(linalg::two_means_split({1, 1, 1, 0, 0}) == 3);
    CHECK(linalg::two_means_split({2, 2, 2, 2}) == 4);
    CHECK(linalg::two_means_split({7.0}) == 1);
    CHECK_THROWS_AS(linalg::two_means_split({}), std::invalid_argument);
}

TEST_CASE("two_means_split agrees with exhaustive enumeration") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(gen() % 11);  // lengths 2..12
        std::vector<double> values(m);
        for (double& v : values) v = rng::standard_normal(gen);
        const int high = linalg::two_means_split(values);
        REQUIRE(high >= 1);
        REQUIRE(high <= m);
        const double achieved = split_ss(values, high);
        const double best = best_two_partition_ss(values);
        CHECK(achieved == doctest::Approx(best).epsilon(1e-10));
    }
}
