#pragma once

// CSV ingestion for datasets: rectangular numeric rows, optional header,
// optional trailing label column.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chsup/common.hpp"

namespace chsup {

struct Dataset {
    Matrix points;            // n x p
    std::vector<int> labels;  // empty unless labeled (0 normal, 1 outlier)

    std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    int dimension() const { return static_cast<int>(points.cols()); }
    bool has_labels() const { return !labels.empty(); }
};

namespace detail {
inline double parse_cell(const std::string& cell, int line, int col) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &pos);
    } catch (...) {
        throw ValidationError("csv: non-numeric cell at line " + std::to_string(line) +
                              ", column " + std::to_string(col) + ": '" + cell + "'");
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size())
        throw ValidationError("csv: trailing junk at line " + std::to_string(line) +
                              ", column " + std::to_string(col));
    if (!std::isfinite(value))
        throw ValidationError("csv: non-finite value at line " + std::to_string(line) +
                              ", column " + std::to_string(col));
    return value;
}
}  // namespace detail

inline Dataset ingest_csv(std::istream& is, bool has_header, bool last_column_is_label = false) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    std::size_t width = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (has_header && lineno == 1) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            row.push_back(detail::parse_cell(cell, lineno, col));
        }
        if (width == 0) width = row.size();
        else if (row.size() != width)
            throw ValidationError("csv: ragged row at line " + std::to_string(lineno) +
                                  " (expected " + std::to_string(width) + " cells, got " +
                                  std::to_string(row.size()) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("csv: empty file");
    const std::size_t p = last_column_is_label ? width - 1 : width;
    if (p == 0) throw ValidationError("csv: no feature columns");
    Dataset ds;
    ds.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < p; ++j)
            ds.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        if (last_column_is_label)
            ds.labels.push_back(rows[i][p] != 0.0 ? 1 : 0);
    }
    return ds;
}

inline Dataset ingest_csv(const std::string& path, bool has_header,
                          bool last_column_is_label = false) {
    std::ifstream is(path);
    if (!is) throw ValidationError("csv: cannot open " + path);
    return ingest_csv(is, has_header, last_column_is_label);
}

inline void write_csv(const Matrix& points, std::ostream& os) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = 0; j < points.cols(); ++j) os << (j ? "," : "") << points(i, j);
        os << "\n";
    }
}

}  // namespace chsup
