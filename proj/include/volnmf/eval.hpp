#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "volnmf/linalg.hpp"
#include "volnmf/matrix.hpp"

namespace volnmf {

/// Best column permutation and positive per-column scaling matching an
/// estimated basis to a reference one. aligned(:,k) = scaling[k] *
/// m_est(:, permutation[k]); errors are against m_true.
struct AlignmentResult {
    std::vector<std::size_t> permutation;
    std::vector<double> scaling;
    double mean_abs_error = 0.0;
    std::vector<double> per_column_error;
};

/// Exhaustive search over column permutations (K <= 8), with the closed-form
/// least-squares scaling s_k = <est, true>/||est||^2 floored at 1e-12 per
/// column. The permutation minimizing total squared error wins; ties go to
/// the lexicographically smallest permutation.
inline AlignmentResult align_basis(const Matrix& m_est, const Matrix& m_true) {
    if (!m_est.same_shape(m_true))
        throw ShapeMismatch("align_basis: factor shapes disagree");
    const std::size_t k = m_est.cols();
    const std::size_t rows = m_est.rows();
    if (k > 8) throw Error("align_basis: exhaustive search limited to K <= 8");

    std::vector<double> norm_sq(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < rows; ++r) norm_sq[c] += m_est(r, c) * m_est(r, c);
        if (norm_sq[c] < 1e-24)
            throw ColumnCollapse("estimated column " + std::to_string(c + 1) +
                                 " has vanishing norm");
    }

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    AlignmentResult best;
    double best_sq = -1.0;
    do {
        double total_sq = 0.0;
        std::vector<double> scaling(k);
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t src = perm[c];
            double dot_et = 0.0;
            for (std::size_t r = 0; r < rows; ++r) dot_et += m_est(r, src) * m_true(r, c);
            const double s = std::max(dot_et / norm_sq[src], 1e-12);
            scaling[c] = s;
            for (std::size_t r = 0; r < rows; ++r) {
                const double d = s * m_est(r, src) - m_true(r, c);
                total_sq += d * d;
            }
        }
        if (best_sq < 0.0 || total_sq < best_sq) {
            best_sq = total_sq;
            best.permutation = perm;
            best.scaling = std::move(scaling);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    best.per_column_error.assign(k, 0.0);
    double abs_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double col_abs = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double d =
                best.scaling[c] * m_est(r, best.permutation[c]) - m_true(r, c);
            col_abs += std::abs(d);
        }
        best.per_column_error[c] = col_abs / static_cast<double>(rows);
        abs_sum += col_abs;
    }
    best.mean_abs_error = abs_sum / static_cast<double>(rows * k);
    return best;
}

/// logdet(M'M + delta I). The reporting delta defaults to the solver's 0.1:
/// recomputing volumes from fixed reference factors only reproduces the
/// published values at that shift (a near-zero shift misses them by > 2).
inline double volume_logdet(const Matrix& m, double delta_metric = 0.1) {
    return logdet_shifted_gram(gram_of_columns(m), delta_metric);
}

/// Number of entries with |value| < tol.
inline std::size_t sparsity_count(const Matrix& a, double tol = 1e-4) {
    std::size_t n = 0;
    for (double v : a.values())
        if (std::abs(v) < tol) ++n;
    return n;
}

struct MetricsReport {
    double fit_rel = 0.0;      // ||X - MH||_F / ||X||_F
    double volume_logdet = 0.0;   // logdet(M'M + delta I)
    double volume_logdet_h = 0.0; // logdet(HH' + delta I)
    std::size_t sparsity_m = 0;
    std::size_t sparsity_h = 0;
    double delta_metric = 0.1;
};

inline MetricsReport metrics_report(const Matrix& x, const Matrix& m, const Matrix& h,
                                    double delta_metric = 0.1) {
    if (m.rows() != x.rows() || m.cols() != h.rows() || h.cols() != x.cols())
        throw ShapeMismatch("metrics_report: nonconformable shapes");
    MetricsReport r;
    const double x_norm = std::sqrt(frobenius_norm_sq(x));
    const double resid = std::sqrt(frobenius_norm_sq(subtract(x, multiply(m, h))));
    r.fit_rel = x_norm > 0.0 ? resid / x_norm : 0.0;
    r.volume_logdet = volume_logdet(m, delta_metric);
    r.volume_logdet_h = logdet_shifted_gram(gram_of_rows(h), delta_metric);
    r.sparsity_m = sparsity_count(m);
    r.sparsity_h = sparsity_count(h);
    r.delta_metric = delta_metric;
    return r;
}

} // namespace volnmf
