#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "volnmf/matrix.hpp"

namespace volnmf {

/// Squared Frobenius norm: sum of squared entries, accumulated in row-major
/// order (fixed order keeps repeated runs bit-identical).
inline double frobenius_norm_sq(const Matrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return s;
}

namespace detail {

inline void require_symmetric(const Matrix& g, double tol = 1e-10) {
    if (g.rows() != g.cols())
        throw ShapeMismatch("expected a square matrix");
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = i + 1; j < g.cols(); ++j)
            if (std::abs(g(i, j) - g(j, i)) > tol)
                throw ShapeMismatch("matrix is not symmetric within tolerance");
}

} // namespace detail

/// Lower-triangular Cholesky factor of g + delta*I.
/// Throws NotPositiveDefinite when a pivot is not strictly positive.
inline Matrix cholesky_shifted(const Matrix& g, double delta) {
    detail::require_symmetric(g);
    const std::size_t n = g.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j) + delta;
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite("Cholesky pivot <= 0 (matrix not positive definite)");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

/// log det(g + delta*I) for symmetric PSD g, via Cholesky:
/// 2 * sum(log(diagonal of the factor)).
inline double logdet_shifted_gram(const Matrix& g, double delta) {
    const Matrix l = cholesky_shifted(g, delta);
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

/// Solve (L L') x = b in place of b, given the lower-triangular factor L.
inline void cholesky_solve_inplace(const Matrix& l, std::vector<double>& b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
        b[i] = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * b[k];
        b[ii] = s / l(ii, ii);
    }
}

/// Inverse of g + delta*I via Cholesky solves against the identity columns.
/// Result is symmetrized to guard against rounding drift.
inline Matrix spd_inverse_shifted(const Matrix& g, double delta) {
    const Matrix l = cholesky_shifted(g, delta);
    const std::size_t n = g.rows();
    Matrix inv(n, n);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        cholesky_solve_inplace(l, col);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = v;
            inv(j, i) = v;
        }
    return inv;
}

struct SpectralBounds {
    double l_max = 0.0;
    double l_min = 0.0;
};

namespace detail {

// Deterministic start vector with all-nonzero, non-symmetric components so
// power iteration cannot start orthogonal to the dominant eigenvector of a
// structured matrix.
inline std::vector<double> power_start(std::size_t n) {
    std::vector<double> v(n);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.137 * static_cast<double>(i + 1);
        norm_sq += v[i] * v[i];
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

inline void matvec(const Matrix& g, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = g.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = g.row(i);
        for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
    }
}

} // namespace detail

/// Extreme eigenvalues of a symmetric PSD matrix. l_max by power iteration,
/// l_min by inverse power iteration on g + 1e-12*I (the floor keeps the solve
/// alive on rank-deficient Grams). Relative tolerance 1e-8, capped at 1000
/// iterations; guarantees l_max >= l_min >= 0.
inline SpectralBounds spectral_bounds(const Matrix& g) {
    detail::require_symmetric(g);
    const std::size_t n = g.rows();
    if (n == 0) return {0.0, 0.0};

    constexpr double kRelTol = 1e-8;
    constexpr int kMaxIter = 1000;
    constexpr double kShift = 1e-12;

    std::vector<double> v = detail::power_start(n);
    std::vector<double> w(n);
    double lmax = 0.0;
    bool settled = false;
    for (int it = 0; it < kMaxIter; ++it) {
        detail::matvec(g, v, w);
        double norm_sq = 0.0;
        for (double x : w) norm_sq += x * x;
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-300) { // g annihilates v: treat as the zero matrix
            lmax = 0.0;
            settled = true;
            break;
        }
        const double est = norm; // Rayleigh quotient for unit v equals |Gv|
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (it > 0 && std::abs(est - lmax) <= kRelTol * std::max(est, 1e-300)) {
            lmax = est;
            settled = true;
            break;
        }
        lmax = est;
    }
    if (!settled)
        throw ConvergenceFailure("power iteration did not stabilize");

    double lmin = 0.0;
    if (lmax > 0.0) {
        const Matrix l = cholesky_shifted(g, kShift);
        std::vector<double> u = detail::power_start(n);
        double mu = 0.0;
        settled = false;
        for (int it = 0; it < kMaxIter; ++it) {
            std::vector<double> z = u;
            cholesky_solve_inplace(l, z);
            double norm_sq = 0.0;
            for (double x : z) norm_sq += x * x;
            const double norm = std::sqrt(norm_sq);
            if (norm < 1e-300) {
                mu = 0.0;
                settled = true;
                break;
            }
            const double est = norm; // dominant eigenvalue of (g + shift)^-1
            for (std::size_t i = 0; i < n; ++i) u[i] = z[i] / norm;
            if (it > 0 && std::abs(est - mu) <= kRelTol * std::max(est, 1e-300)) {
                mu = est;
                settled = true;
                break;
            }
            mu = est;
        }
        if (!settled)
            throw ConvergenceFailure("inverse power iteration did not stabilize");
        lmin = mu > 0.0 ? 1.0 / mu - kShift : 0.0;
    }

    if (lmin < 0.0) lmin = 0.0;
    if (lmin > lmax) lmin = lmax;
    return {lmax, lmin};
}

/// Trace, the fallback overestimate of l_max when power iteration fails.
inline double trace(const Matrix& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(g.rows(), g.cols()); ++i) s += g(i, i);
    return s;
}

} // namespace volnmf
