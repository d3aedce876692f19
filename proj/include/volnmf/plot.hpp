#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "volnmf/csv.hpp"
#include "volnmf/linalg.hpp"
#include "volnmf/matrix.hpp"

namespace volnmf {

/// Barycentric coordinates (unit-sum 3-vectors) mapped onto the fixed
/// equilateral embedding p = c1 (0,0) + c2 (1,0) + c3 (0.5, sqrt(3)/2).
inline std::pair<double, double> barycentric_to_plane(double c1, double c2, double c3) {
    return {c2 + 0.5 * c3, c3 * 0.8660254037844386};
}

namespace detail {

/// Coordinates of a column vector in the frame spanned by the columns of
/// `frame` (least squares via the normal equations), normalized to unit sum.
inline std::vector<double> frame_coordinates(const Matrix& frame, const Matrix& source,
                                             std::size_t col) {
    const Matrix g = gram_of_columns(frame);
    const Matrix l = cholesky_shifted(g, 1e-12);
    std::vector<double> rhs(frame.cols(), 0.0);
    for (std::size_t c = 0; c < frame.cols(); ++c)
        for (std::size_t r = 0; r < frame.rows(); ++r)
            rhs[c] += frame(r, c) * source(r, col);
    cholesky_solve_inplace(l, rhs);
    double sum = 0.0;
    for (double v : rhs) sum += v;
    if (std::abs(sum) > 1e-12)
        for (auto& v : rhs) v /= sum;
    return rhs;
}

} // namespace detail

struct SimplexPlotOptions {
    double width = 640.0;
    double height = 600.0;
    double margin = 60.0;
};

/// Standalone SVG of the unit-sum slice: data points as circles, the
/// reference simplex as a solid triangle (when a reference basis is given),
/// the estimated simplex as a dashed triangle. All K = 3.
///
/// `data` is either a 3 x J coefficient matrix (barycentric coordinates
/// directly) or an I x J observation matrix whose columns are expressed in
/// the frame of the reference basis (the estimate's, when no reference is
/// given) by least squares.
inline void write_simplex_svg(const Matrix& m_est,
                              const std::optional<Matrix>& m_true,
                              const Matrix& data,
                              const std::filesystem::path& out_path,
                              const SimplexPlotOptions& opt = {}) {
    if (m_est.cols() != 3 || (m_true && m_true->cols() != 3))
        throw ShapeMismatch("simplex plot requires K = 3 factors");

    const Matrix& frame = m_true ? *m_true : m_est;

    // collect barycentric coordinates
    std::vector<std::vector<double>> points;
    if (data.rows() == 3) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            std::vector<double> c = {data(0, j), data(1, j), data(2, j)};
            double sum = c[0] + c[1] + c[2];
            if (std::abs(sum) > 1e-12)
                for (auto& v : c) v /= sum;
            points.push_back(std::move(c));
        }
    } else {
        if (data.rows() != frame.rows())
            throw ShapeMismatch("data rows do not match the basis");
        for (std::size_t j = 0; j < data.cols(); ++j)
            points.push_back(detail::frame_coordinates(frame, data, j));
    }

    std::vector<std::vector<double>> est_vertices;
    for (std::size_t c = 0; c < 3; ++c) {
        Matrix col(m_est.rows(), 1);
        for (std::size_t r = 0; r < m_est.rows(); ++r) col(r, 0) = m_est(r, c);
        est_vertices.push_back(detail::frame_coordinates(frame, col, 0));
    }

    const double span_x = 1.0;
    const double span_y = 0.8660254037844386;
    const double sx = (opt.width - 2.0 * opt.margin) / span_x;
    const double sy = (opt.height - 2.0 * opt.margin) / span_y;
    const double s = std::min(sx, sy);
    const auto pixel = [&](const std::vector<double>& c) {
        const auto [x, y] = barycentric_to_plane(c[0], c[1], c[2]);
        return std::pair<double, double>{opt.margin + x * s,
                                         opt.height - opt.margin - y * s};
    };

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + out_path.string() + "'");
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
        << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
        << opt.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const auto& p : points) {
        const auto [px, py] = pixel(p);
        out << "<circle cx=\"" << format_double(px) << "\" cy=\"" << format_double(py)
            << "\" r=\"3\" fill=\"#4682b4\" fill-opacity=\"0.45\"/>\n";
    }

    if (m_true) {
        // the reference simplex is the frame itself: its corners
        const std::vector<std::vector<double>> corners = {
            {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        out << "<polygon points=\"";
        for (const auto& c : corners) {
            const auto [px, py] = pixel(c);
            out << format_double(px) << ',' << format_double(py) << ' ';
        }
        out << "\" fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\"/>\n";
    }

    out << "<polygon points=\"";
    for (const auto& v : est_vertices) {
        const auto [px, py] = pixel(v);
        out << format_double(px) << ',' << format_double(py) << ' ';
    }
    out << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"7,5\"/>\n";

    const double lx = opt.margin * 0.5;
    double ly = opt.margin * 0.5;
    out << "<circle cx=\"" << lx << "\" cy=\"" << ly
        << "\" r=\"4\" fill=\"#4682b4\" fill-opacity=\"0.45\"/>"
        << "<text x=\"" << lx + 10 << "\" y=\"" << ly + 4
        << "\" font-size=\"13\" font-family=\"sans-serif\">data columns</text>\n";
    if (m_true) {
        ly += 20.0;
        out << "<line x1=\"" << lx - 6 << "\" y1=\"" << ly << "\" x2=\"" << lx + 6
            << "\" y2=\"" << ly << "\" stroke=\"#222222\" stroke-width=\"1.5\"/>"
            << "<text x=\"" << lx + 10 << "\" y=\"" << ly + 4
            << "\" font-size=\"13\" font-family=\"sans-serif\">reference simplex</text>\n";
    }
    ly += 20.0;
    out << "<line x1=\"" << lx - 6 << "\" y1=\"" << ly << "\" x2=\"" << lx + 6
        << "\" y2=\"" << ly
        << "\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"7,5\"/>"
        << "<text x=\"" << lx + 10 << "\" y=\"" << ly + 4
        << "\" font-size=\"13\" font-family=\"sans-serif\">estimated simplex</text>\n";

    out << "</svg>\n";
    if (!out) throw Error("write failed for '" + out_path.string() + "'");
}

} // namespace volnmf
