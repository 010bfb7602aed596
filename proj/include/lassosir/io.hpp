#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

// CSV ingestion (RFC-4180-style), quantile normalization, and the matrix
// file formats the CLI reads and writes. Files keep the conventional
// samples-as-rows layout and are transposed into the p x n convention on
// load; doubles are written with 17 significant digits so values round-trip
// exactly.
namespace lassosir::io {

struct LoadedData {
    std::vector<std::string> names;  // predictor names, size p
    Eigen::MatrixXd X;               // p x n
    Eigen::VectorXd y;
    std::string response_name;
};

/// `response` selects the response column by header name, or positionally
/// (1-based) when it parses as an integer and no header name matches (always
/// positional with header=false). Missing or non-numeric cells raise
/// parse_error with the offending row and column. A constant response is
/// rejected.
LoadedData load_csv(const std::string& path, const std::string& response, bool header);

/// Replace every row by normal scores Phi^-1((rank - 0.5) / n) with average
/// ranks on ties. A constant row has no defined ranks and raises
/// std::invalid_argument naming the variable.
Eigen::MatrixXd quantile_normalize(const Eigen::MatrixXd& X,
                                   const std::vector<std::string>* names = nullptr);

/// Headerless numeric CSV, one matrix row per line.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

/// Dataset file consumed by `fit`: header x1..xp,y, samples as rows.
void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y);

}  // namespace lassosir::io
