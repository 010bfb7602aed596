#include "lassosir/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lassosir::linalg {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B, double tol) {
    if (!B.allFinite())
        throw std::invalid_argument("orthonormal_basis: input has non-finite entries");
    if (tol <= 0.0)
        throw std::invalid_argument("orthonormal_basis: tol must be positive");
    if (B.cols() == 0) return Eigen::MatrixXd(B.rows(), 0);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
    return svd.matrixU().leftCols(rank);
}

double projection_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.rows() != B.rows())
        throw std::invalid_argument("projection_distance: row counts differ");
    const Eigen::MatrixXd qa = orthonormal_basis(A);
    const Eigen::MatrixXd qb = orthonormal_basis(B);
    // ||P_A - P_B||_F^2 = ||(I - P_B) Q_A||_F^2 + ||(I - P_A) Q_B||_F^2;
    // the residual form avoids cancellation when the spans nearly coincide,
    // and the p x p projections are never formed.
    const Eigen::MatrixXd cross = qa.transpose() * qb;  // r_A x r_B
    const double sq = (qa - qb * cross.transpose()).squaredNorm() +
                      (qb - qa * cross).squaredNorm();
    return std::sqrt(std::max(0.0, sq));
}

EigenPairs top_eigenpairs(const Eigen::MatrixXd& F, int k) {
    if (!F.allFinite())
        throw std::invalid_argument("top_eigenpairs: input has non-finite entries");
    const int max_k = static_cast<int>(std::min(F.rows(), F.cols()));
    if (k < 0 || k > max_k)
        throw std::invalid_argument("top_eigenpairs: k exceeds min(rows, cols)");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeThinU);
    EigenPairs out;
    out.values = svd.singularValues().head(k).array().square();
    out.vectors = svd.matrixU().leftCols(k);
    return out;
}

int two_means_split(std::vector<double> values) {
    const int m = static_cast<int>(values.size());
    if (m == 0) throw std::invalid_argument("two_means_split: empty input");
    std::sort(values.begin(), values.end());
    if (values.front() == values.back()) return m;  // degenerate: no gap

    // Prefix sums give each contiguous segment's within-SS in O(1).
    std::vector<double> s(m + 1, 0.0), s2(m + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        s[i + 1] = s[i] + values[i];
        s2[i + 1] = s2[i] + values[i] * values[i];
    }
    auto within = [&](int lo, int hi) {  // half-open [lo, hi)
        const double len = hi - lo;
        const double sum = s[hi] - s[lo];
        return (s2[hi] - s2[lo]) - sum * sum / len;
    };

    // k = size of the lower cluster; ties resolve to the largest k, i.e. the
    // most conservative signal count.
    int best_k = 1;
    double best_ss = within(0, 1) + within(1, m);
    for (int k = 2; k < m; ++k) {
        const double ss = within(0, k) + within(k, m);
        if (ss <= best_ss) {
            best_ss = ss;
            best_k = k;
        }
    }
    return m - best_k;
}

}  // namespace lassosir::linalg
