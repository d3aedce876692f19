#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "volnmf/linalg.hpp"
#include "volnmf/matrix.hpp"
#include "volnmf/rng.hpp"

namespace volnmf {

/// Which factor, and which axis of it, carries the sum-to-one constraint.
/// The four sum-to-one variants are interchangeable in the model; NonnegOnly
/// drops the affine constraint entirely.
enum class ConstraintPlacement {
    MRowsSumOne,
    MColsSumOne,
    HRowsSumOne,
    HColsSumOne,
    NonnegOnly,
};

enum class FactorSide { M, H };

/// Euclidean projection of v onto the probability simplex
/// {w >= 0, sum(w) = 1}, by sort-and-threshold: sort descending, find the
/// largest k with v_(k) - (sum of top k - 1)/k > 0, subtract that average
/// and clip at zero.
inline std::vector<double> project_simplex_vector(std::vector<double> v) {
    const std::size_t n = v.size();
    // already-feasible inputs are returned untouched, which makes the
    // projection an exact fixed point on its own outputs
    double sum = 0.0;
    double lo = 0.0;
    for (double x : v) {
        sum += x;
        lo = std::min(lo, x);
    }
    if (lo >= 0.0 && std::abs(sum - 1.0) <= 1e-13) return v;

    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double running = 0.0;
    double tau = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        running += sorted[k];
        const double cand = (running - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - cand > 0.0) tau = cand;
    }
    for (auto& x : v) x = std::max(x - tau, 0.0);
    return v;
}

namespace detail {

inline void project_rows_simplex(Matrix& a) {
    std::vector<double> row(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy(a.row(i), a.row(i) + a.cols(), row.begin());
        const std::vector<double> p = project_simplex_vector(row);
        std::copy(p.begin(), p.end(), a.row(i));
    }
}

inline void project_cols_simplex(Matrix& a) {
    std::vector<double> col(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, j);
        const std::vector<double> p = project_simplex_vector(col);
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) = p[i];
    }
}

} // namespace detail

/// Project factor `which` onto its feasible set: per-row or per-column
/// simplex projection when the placement names this factor, plain
/// nonnegative clipping otherwise.
inline Matrix project_constraint(Matrix a, FactorSide which, ConstraintPlacement placement) {
    const bool on_m = placement == ConstraintPlacement::MRowsSumOne ||
                      placement == ConstraintPlacement::MColsSumOne;
    const bool on_h = placement == ConstraintPlacement::HRowsSumOne ||
                      placement == ConstraintPlacement::HColsSumOne;
    const bool applies = (which == FactorSide::M && on_m) || (which == FactorSide::H && on_h);
    if (!applies) {
        for (std::size_t i = 0; i < a.size(); ++i)
            a.data()[i] = std::max(a.data()[i], 0.0);
        return a;
    }
    const bool rows = placement == ConstraintPlacement::MRowsSumOne ||
                      placement == ConstraintPlacement::HRowsSumOne;
    if (rows)
        detail::project_rows_simplex(a);
    else
        detail::project_cols_simplex(a);
    return a;
}

/// Membership in the second-order cone C = {y >= 0 : 1'y >= sqrt(K-1)||y||}.
inline bool in_cone_c(const std::vector<double>& y, double tol = 1e-10) {
    double sum = 0.0, norm_sq = 0.0;
    for (double v : y) {
        if (v < -tol) return false;
        sum += v;
        norm_sq += v * v;
    }
    const double root = std::sqrt(static_cast<double>(y.size()) - 1.0);
    return sum >= root * std::sqrt(norm_sq) - tol;
}

/// Membership in the dual cone C* = {y : 1'y >= ||y||}.
inline bool in_cone_c_dual(const std::vector<double>& y, double tol = 1e-10) {
    double sum = 0.0, norm_sq = 0.0;
    for (double v : y) {
        sum += v;
        norm_sq += v * v;
    }
    return sum >= std::sqrt(norm_sq) - tol;
}

enum class SSCVerdict { Holds, Violated, ProbablyHolds, NotChecked };

enum class SSCMethod { ExactK3, Sampling };

/// Result of a sufficiently-scattered check on the rows of a candidate
/// basis (the cone under test is generated by the rows of the argument).
/// A Violated verdict carries a unit-norm witness direction.
struct SSCReport {
    SSCVerdict ssc1 = SSCVerdict::NotChecked;
    SSCVerdict ssc2 = SSCVerdict::NotChecked;
    std::optional<std::vector<double>> certificate;
    SSCMethod method = SSCMethod::ExactK3;
    std::size_t samples_used = 0;
};

namespace detail {

inline std::array<double, 3> cross3(const double* a, const double* b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline double min_constraint_value(const Matrix& m, const std::vector<double>& y) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        const double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) s += row[j] * y[j];
        lo = std::min(lo, s);
    }
    return lo;
}

} // namespace detail

/// Exact SSC check for K = 3 by extreme-ray enumeration of the dual cone
/// {y : M y >= 0}. Every extreme ray of a pointed 3-D polyhedral cone has two
/// independent active constraints, so each ray is (up to sign) a cross
/// product of two rows of M; feasibility plus de-duplication enumerates them
/// all. SSC1 holds iff every ray lies in C*; SSC2 holds iff every ray on the
/// boundary of C* is a standard basis direction.
inline SSCReport ssc_check_exact_k3(const Matrix& m) {
    constexpr double kTol = 1e-10;
    if (m.cols() != 3)
        throw ShapeMismatch("exact SSC check requires exactly 3 columns");
    if (m.rows() < 3)
        throw RankDeficient("need at least 3 rows for a rank-3 cone");

    // rank test on the 3x3 Gram: det against the Hadamard bound
    const Matrix g = gram_of_columns(m);
    const double det = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) -
                       g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0)) +
                       g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
    const double hadamard = std::max(g(0, 0) * g(1, 1) * g(2, 2), 1e-300);
    if (det <= 1e-12 * hadamard)
        throw RankDeficient("rows span less than 3 dimensions");

    std::vector<std::vector<double>> rays;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.rows(); ++j) {
            const auto c = detail::cross3(m.row(i), m.row(j));
            const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
            if (norm < 1e-14) continue; // parallel rows generate no ray
            for (const double sign : {1.0, -1.0}) {
                std::vector<double> y = {sign * c[0] / norm, sign * c[1] / norm,
                                         sign * c[2] / norm};
                if (detail::min_constraint_value(m, y) < -kTol) continue;
                bool dup = false;
                for (const auto& r : rays) {
                    const double d = r[0] * y[0] + r[1] * y[1] + r[2] * y[2];
                    if (d > 1.0 - 1e-8) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) rays.push_back(std::move(y));
            }
        }
    }
    if (rays.empty())
        throw DegenerateRays("no extreme rays found (numerically collapsed input)");

    SSCReport report;
    report.method = SSCMethod::ExactK3;
    report.ssc1 = SSCVerdict::Holds;
    report.ssc2 = SSCVerdict::Holds;
    for (const auto& y : rays) {
        const double sum = y[0] + y[1] + y[2]; // ||y|| == 1
        if (sum < 1.0 - kTol) {
            report.ssc1 = SSCVerdict::Violated;
            if (!report.certificate) report.certificate = y;
            continue;
        }
        if (std::abs(sum - 1.0) <= kTol) {
            bool is_basis = false;
            for (int k = 0; k < 3; ++k)
                if (std::abs(y[k] - 1.0) <= 1e-8 && std::abs(y[(k + 1) % 3]) <= 1e-8 &&
                    std::abs(y[(k + 2) % 3]) <= 1e-8)
                    is_basis = true;
            if (!is_basis) {
                report.ssc2 = SSCVerdict::Violated;
                if (!report.certificate) report.certificate = y;
            }
        }
    }
    return report;
}

/// Probabilistic SSC1 check for arbitrary K: sample unit directions, keep the
/// ones inside the dual cone {y : M y >= 0}, and test membership in C*. A
/// found violation is a constructive witness; absence of one only says
/// "probably holds". SSC2 is invisible to sampling (boundary has measure
/// zero) and is reported NotChecked.
inline SSCReport ssc_check_sampling(const Matrix& m, std::size_t n_samples,
                                    std::uint64_t seed) {
    constexpr double kTol = 1e-10;
    if (m.cols() < 2)
        throw ShapeMismatch("SSC sampling check requires K >= 2");
    Rng rng(seed);
    SSCReport report;
    report.method = SSCMethod::Sampling;
    report.ssc2 = SSCVerdict::NotChecked;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::vector<double> y = rng.unit_sphere(m.cols());
        report.samples_used = s + 1;
        if (detail::min_constraint_value(m, y) < -kTol) continue;
        double sum = 0.0;
        for (double v : y) sum += v;
        if (sum < 1.0 - kTol) { // unit vector: ||y|| == 1
            report.ssc1 = SSCVerdict::Violated;
            report.certificate = y;
            return report;
        }
    }
    report.ssc1 = SSCVerdict::ProbablyHolds;
    return report;
}

} // namespace volnmf
