#include "lassosir/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lassosir/errors.hpp"
#include "lassosir/rng.hpp"

namespace lassosir::io {

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                any = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                    any = false;
                }
                break;
            default:
                field += c;
                any = true;
                break;
        }
    }
    if (quoted) throw parse_error(path + ": unterminated quoted field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw parse_error(path + ": file is empty");
    return rows;
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
    const std::string s = trimmed(raw);
    const std::string where =
        " at row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
    if (s.empty()) throw parse_error("missing value" + where);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size())
        throw parse_error("non-numeric cell '" + s + "'" + where);
    return value;
}

}  // namespace

LoadedData load_csv(const std::string& path, const std::string& response, bool header) {
    const auto rows = parse_csv(path);
    const std::size_t width = rows[0].size();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw parse_error(path + ": row " + std::to_string(r + 1) + " has " +
                              std::to_string(rows[r].size()) + " fields, expected " +
                              std::to_string(width));
    if (width < 2) throw parse_error(path + ": need at least one predictor and the response");

    std::vector<std::string> names(width);
    std::size_t first_data = 0;
    if (header) {
        for (std::size_t c = 0; c < width; ++c) names[c] = trimmed(rows[0][c]);
        first_data = 1;
        if (rows.size() < 2) throw parse_error(path + ": no data rows after the header");
    } else {
        for (std::size_t c = 0; c < width; ++c) names[c] = "x" + std::to_string(c + 1);
    }

    std::size_t response_col = width;
    if (header)
        for (std::size_t c = 0; c < width; ++c)
            if (names[c] == response) response_col = c;
    if (response_col == width) {
        int idx = 0;
        const auto [end, ec] =
            std::from_chars(response.data(), response.data() + response.size(), idx);
        if (ec == std::errc() && end == response.data() + response.size() && idx >= 1 &&
            static_cast<std::size_t>(idx) <= width)
            response_col = static_cast<std::size_t>(idx - 1);
    }
    if (response_col == width)
        throw std::invalid_argument("response column '" + response + "' not found in " + path);

    const std::size_t n = rows.size() - first_data;
    const std::size_t p = width - 1;
    LoadedData data;
    data.X.resize(p, n);
    data.y.resize(n);
    data.response_name = names[response_col];
    for (std::size_t c = 0; c < width; ++c)
        if (c != response_col) data.names.push_back(names[c]);

    for (std::size_t r = 0; r < n; ++r) {
        std::size_t out_col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            const double value = parse_cell(rows[r + first_data][c], r + first_data, c);
            if (c == response_col)
                data.y(r) = value;
            else
                data.X(out_col++, r) = value;
        }
    }

    if (n > 0 && data.y.minCoeff() == data.y.maxCoeff())
        throw std::invalid_argument(path + ": response column '" + data.response_name +
                                    "' is constant");
    return data;
}

Eigen::MatrixXd quantile_normalize(const Eigen::MatrixXd& X,
                                   const std::vector<std::string>* names) {
    const int p = static_cast<int>(X.rows());
    const int n = static_cast<int>(X.cols());
    if (n < 2) throw std::invalid_argument("quantile_normalize: need at least 2 samples");

    Eigen::MatrixXd out(p, n);
    std::vector<int> order(n);
    for (int i = 0; i < p; ++i) {
        if (X.row(i).minCoeff() == X.row(i).maxCoeff()) {
            const std::string label = names && i < static_cast<int>(names->size())
                                          ? (*names)[i]
                                          : "row " + std::to_string(i + 1);
            throw std::invalid_argument("quantile_normalize: variable '" + label +
                                        "' is constant; ranks are undefined");
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return X(i, a) < X(i, b); });
        // average ranks over tied runs, then map through the normal quantile
        int start = 0;
        while (start < n) {
            int stop = start + 1;
            while (stop < n && X(i, order[stop]) == X(i, order[start])) ++stop;
            const double rank = 0.5 * (start + 1 + stop);  // mean of 1-based ranks
            const double score = rng::normal_quantile((rank - 0.5) / n);
            for (int k = start; k < stop; ++k) out(i, order[k]) = score;
            start = stop;
        }
    }
    return out;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    char buf[64];
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", M(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    const auto rows = parse_csv(path);
    const std::size_t width = rows[0].size();
    Eigen::MatrixXd M(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw parse_error(path + ": row " + std::to_string(r + 1) +
                              " has a different field count");
        for (std::size_t c = 0; c < width; ++c) M(r, c) = parse_cell(rows[r][c], r, c);
    }
    return M;
}

void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (Eigen::Index j = 0; j < X.rows(); ++j) out << 'x' << (j + 1) << ',';
    out << "y\n";
    char buf[64];
    for (Eigen::Index s = 0; s < X.cols(); ++s) {
        for (Eigen::Index j = 0; j < X.rows(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", X(j, s));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", y(s));
        out << buf << '\n';
    }
}

}  // namespace lassosir::io
