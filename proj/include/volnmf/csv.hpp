#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "volnmf/dataset.hpp"
#include "volnmf/matrix.hpp"

namespace volnmf {

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    // tolerate one leading '+' which from_chars rejects
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

} // namespace detail

/// Parse CSV text into a Dataset. Layout is auto-detected: a first row whose
/// non-leading fields are not all numeric is a header, and a first column
/// whose fields are not numeric is a label column. Decimal separator is the
/// period; rows must be rectangular.
inline Dataset load_csv_text(const std::string& text, const std::string& origin = "<memory>") {
    std::vector<std::vector<std::string>> cells;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() && in.eof()) break;
            auto fields = detail::split_csv_line(line);
            for (auto& f : fields) f = detail::trim(f);
            cells.push_back(std::move(fields));
        }
    }
    if (cells.empty()) throw ParseError(origin + ": empty CSV");

    const std::size_t width = cells.front().size();
    for (std::size_t r = 0; r < cells.size(); ++r)
        if (cells[r].size() != width)
            throw RaggedRows(origin + ": line " + std::to_string(r + 1) + " has " +
                             std::to_string(cells[r].size()) + " fields, expected " +
                             std::to_string(width));

    double tmp = 0.0;
    bool has_header = false;
    for (std::size_t c = 1; c < width; ++c)
        if (!cells[0][c].empty() && !detail::parse_double(cells[0][c], tmp)) has_header = true;
    if (width == 1 && !detail::parse_double(cells[0][0], tmp)) has_header = true;

    const std::size_t first_data_row = has_header ? 1 : 0;
    if (first_data_row >= cells.size()) throw ParseError(origin + ": no data rows");

    bool has_labels = false;
    for (std::size_t r = first_data_row; r < cells.size(); ++r)
        if (!detail::parse_double(cells[r][0], tmp)) has_labels = true;
    const std::size_t first_data_col = has_labels ? 1 : 0;
    if (first_data_col >= width) throw ParseError(origin + ": no data columns");

    Dataset d;
    const std::size_t n_rows = cells.size() - first_data_row;
    const std::size_t n_cols = width - first_data_col;
    d.x = Matrix(n_rows, n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& row = cells[r + first_data_row];
        if (has_labels) d.row_labels.push_back(row[0]);
        for (std::size_t c = 0; c < n_cols; ++c) {
            double v;
            if (!detail::parse_double(row[c + first_data_col], v) || !std::isfinite(v))
                throw ParseError(origin + ": bad numeric field at line " +
                                 std::to_string(r + first_data_row + 1) + ", column " +
                                 std::to_string(c + first_data_col + 1) + ": '" +
                                 row[c + first_data_col] + "'");
            d.x(r, c) = v;
        }
    }
    if (has_header)
        for (std::size_t c = first_data_col; c < width; ++c)
            d.col_labels.push_back(cells[0][c]);
    return d;
}

inline Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv_text(buf.str(), path.string());
}

/// Write a matrix (with optional labels) as CSV, LF line endings, values in
/// shortest round-trip decimal form.
inline void write_csv(const Matrix& m, const std::filesystem::path& path,
                      const std::vector<std::string>& row_labels = {},
                      const std::vector<std::string>& col_labels = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (!col_labels.empty()) {
        if (!row_labels.empty()) out << ',';
        for (std::size_t c = 0; c < col_labels.size(); ++c)
            out << col_labels[c] << (c + 1 < col_labels.size() ? "," : "");
        out << '\n';
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (!row_labels.empty()) out << row_labels[r] << ',';
        for (std::size_t c = 0; c < m.cols(); ++c)
            out << format_double(m(r, c)) << (c + 1 < m.cols() ? "," : "");
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void write_csv(const Dataset& d, const std::filesystem::path& path) {
    write_csv(d.x, path, d.row_labels, d.col_labels);
}

} // namespace volnmf
