#pragma once

#include <stdexcept>
#include <string>

namespace lassosir {

/// Spectrum direction required by a computation carries (numerically) no
/// sliced variance.
class degenerate_spectrum_error : public std::runtime_error {
public:
    explicit degenerate_spectrum_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// Reduced covariance in DT-SIR could not be inverted even after ridging.
class singular_covariance_error : public std::runtime_error {
public:
    explicit singular_covariance_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// The regularization path is empty (mu_max = 0).
class empty_path_error : public std::runtime_error {
public:
    explicit empty_path_error(const std::string& what)
        : std::runtime_error(what) {}
};

/// CSV ingestion failure; message carries the row/column location.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace lassosir
