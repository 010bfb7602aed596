#include "lassosir/sir.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lassosir/errors.hpp"

namespace lassosir::sir {

Eigen::MatrixXd center_samples(const Eigen::MatrixXd& X) {
    if (X.cols() < 1)
        throw std::invalid_argument("center_samples: need at least one sample");
    Eigen::MatrixXd out = X;
    out.colwise() -= X.rowwise().mean();
    return out;
}

SlicedDesign assign_slices(const Eigen::VectorXd& y, int slices, bool discrete) {
    const int n = static_cast<int>(y.size());
    SlicedDesign design;
    design.assignment.assign(n, -1);

    if (discrete) {
        std::map<double, int> levels;
        for (int j = 0; j < n; ++j) levels.emplace(y(j), 0);
        const int n_levels = static_cast<int>(levels.size());
        if (n_levels < 2)
            throw std::invalid_argument("assign_slices: discrete response has fewer than 2 levels");
        if (slices != n_levels)
            throw std::invalid_argument("assign_slices: discrete mode requires slices == " +
                                        std::to_string(n_levels) + " distinct levels");
        int h = 0;
        for (auto& [level, idx] : levels) idx = h++;
        design.slice_sizes.assign(n_levels, 0);
        for (int j = 0; j < n; ++j) {
            const int slice = levels.at(y(j));
            design.assignment[j] = slice;
            ++design.slice_sizes[slice];
        }
        return design;
    }

    if (slices < 2 || slices > n)
        throw std::invalid_argument("assign_slices: need 1 < slices <= n");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return y(a) < y(b); });

    design.slice_sizes.assign(slices, n / slices);
    for (int h = 0; h < n % slices; ++h) ++design.slice_sizes[h];

    int pos = 0;
    for (int h = 0; h < slices; ++h)
        for (int c = 0; c < design.slice_sizes[h]; ++c)
            design.assignment[order[pos++]] = h;
    return design;
}

Eigen::MatrixXd slice_means(const Eigen::MatrixXd& X_centered, const SlicedDesign& design) {
    const int n = static_cast<int>(design.assignment.size());
    const int H = static_cast<int>(design.slice_sizes.size());
    if (X_centered.cols() != n)
        throw std::invalid_argument("slice_means: assignment does not cover the samples");
    for (int h = 0; h < H; ++h)
        if (design.slice_sizes[h] < 1)
            throw std::invalid_argument("slice_means: slice " + std::to_string(h + 1) +
                                        " is empty");

    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(X_centered.rows(), H);
    for (int j = 0; j < n; ++j) means.col(design.assignment[j]) += X_centered.col(j);
    for (int h = 0; h < H; ++h) means.col(h) /= static_cast<double>(design.slice_sizes[h]);
    return means;
}

SirSpectrum sir_spectrum(const Eigen::MatrixXd& X_H, int k) {
    const double H = static_cast<double>(X_H.cols());
    const linalg::EigenPairs pairs =
        linalg::top_eigenpairs(X_H / std::sqrt(H), k);
    return SirSpectrum{pairs.values, pairs.vectors};
}

Eigen::MatrixXd pseudo_response(const SlicedDesign& design, const SirSpectrum& spectrum,
                                double eps_lambda) {
    const int n = static_cast<int>(design.assignment.size());
    const int H = static_cast<int>(design.slice_sizes.size());
    const int k = static_cast<int>(spectrum.eigenvalues.size());
    if (design.slice_means.cols() != H)
        throw std::invalid_argument("pseudo_response: design.slice_means not populated");

    for (int i = 0; i < k; ++i)
        if (!(spectrum.eigenvalues(i) > eps_lambda))
            throw degenerate_spectrum_error(
                "pseudo_response: eigenvalue " + std::to_string(i + 1) +
                " carries no sliced variance (lambda <= " + std::to_string(eps_lambda) + ")");

    // projections(h, i) = xbar_h . eta_i
    const Eigen::MatrixXd projections = design.slice_means.transpose() * spectrum.eigenvectors;
    Eigen::MatrixXd pseudo(n, k);
    for (int j = 0; j < n; ++j) {
        const int h = design.assignment[j];
        const double w = static_cast<double>(n) /
                         (static_cast<double>(H) * design.slice_sizes[h]);
        for (int i = 0; i < k; ++i)
            pseudo(j, i) = w / spectrum.eigenvalues(i) * projections(h, i);
    }
    return pseudo;
}

}  // namespace lassosir::sir
