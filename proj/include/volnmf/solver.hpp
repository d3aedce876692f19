#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "volnmf/geometry.hpp"
#include "volnmf/linalg.hpp"
#include "volnmf/matrix.hpp"
#include "volnmf/rng.hpp"

namespace volnmf {

enum class InitMode { RandomUniform, ProvidedFactors };

enum class VolumeSign { MinVol, MaxVol };

/// Tunables of the alternating projected-fast-gradient solver.
/// lambda_prime is the relative regularization weight; the absolute lambda
/// is derived from it at initialization (see compute_lambda).
struct SolverConfig {
    std::size_t k = 3;
    double lambda_prime = 0.1;
    double delta = 0.1;
    std::size_t max_outer = 500;
    std::size_t inner_iter = 50;
    std::uint64_t seed = 0;
    ConstraintPlacement placement = ConstraintPlacement::HColsSumOne;
    InitMode init = InitMode::RandomUniform;
    double tol_objective = 1e-7;
};

/// Factors plus the per-outer-iteration convergence record. History vectors
/// start with the value at initialization, so their length is
/// iterations_run + 1. volume_history tracks logdet(M'M + delta I) of the
/// solve's own M; volume_history_h tracks logdet(HH' + delta I).
struct SolveResult {
    Matrix m;
    Matrix h;
    double lambda = 0.0;
    std::vector<double> objective_history;
    std::vector<double> fit_history;
    std::vector<double> volume_history;
    std::vector<double> volume_history_h;
    std::size_t iterations_run = 0;
    bool converged = false;
    bool degenerate_scale = false; // lambda denominator collapsed; used 1
};

/// Seeded uniform(0,1) factors, with m0 rescaled so mean(M0 H0) matches
/// mean(X) and the constrained factor projected feasible.
inline std::pair<Matrix, Matrix> init_factors(const Matrix& x, std::size_t k,
                                              std::uint64_t seed,
                                              ConstraintPlacement placement) {
    if (k < 1 || k > std::min(x.rows(), x.cols()))
        throw ShapeMismatch("rank k must satisfy 1 <= k <= min(rows, cols)");
    Rng rng(seed);
    Matrix m0(x.rows(), k);
    for (std::size_t i = 0; i < m0.size(); ++i) m0.data()[i] = rng.uniform01();
    Matrix h0(k, x.cols());
    for (std::size_t i = 0; i < h0.size(); ++i) h0.data()[i] = rng.uniform01();

    const double prod_mean = mean(multiply(m0, h0));
    if (prod_mean > 1e-300) {
        const double s = mean(x) / prod_mean;
        for (std::size_t i = 0; i < m0.size(); ++i) m0.data()[i] *= s;
    }
    m0 = project_constraint(std::move(m0), FactorSide::M, placement);
    h0 = project_constraint(std::move(h0), FactorSide::H, placement);
    return {std::move(m0), std::move(h0)};
}

/// lambda = lambda' * ||X - M0 H0||_F^2 / |logdet(M0'M0 + delta I)|.
inline double compute_lambda(const Matrix& x, const Matrix& m0, const Matrix& h0,
                             double lambda_prime, double delta) {
    if (lambda_prime == 0.0) return 0.0;
    const double fit0 = frobenius_norm_sq(subtract(x, multiply(m0, h0)));
    const double ld = logdet_shifted_gram(gram_of_columns(m0), delta);
    if (std::abs(ld) < 1e-12)
        throw DegenerateScale("|logdet(M0'M0 + delta I)| < 1e-12");
    return lambda_prime * fit0 / std::abs(ld);
}

namespace detail {

inline double lmax_or_trace(const Matrix& g) {
    try {
        return spectral_bounds(g).l_max;
    } catch (const ConvergenceFailure&) {
        return trace(g);
    }
}

} // namespace detail

/// Nesterov-accelerated projected gradient on f(H) = ||X - MH||_F^2 with
/// step 1/L, L = 2 lmax(M'M). Momentum restarts whenever the objective
/// rises; the best iterate seen (including the start) is returned, so the
/// objective never increases across a call.
inline Matrix update_h_pfgm(const Matrix& x, const Matrix& m, const Matrix& h_init,
                            ConstraintPlacement placement, std::size_t inner_iter) {
    if (m.rows() != x.rows() || m.cols() != h_init.rows() || h_init.cols() != x.cols())
        throw ShapeMismatch("update_h_pfgm: nonconformable shapes");
    const Matrix g = gram_of_columns(m);
    const double lip = 2.0 * detail::lmax_or_trace(g);
    if (lip <= 0.0) return h_init; // M == 0: gradient vanishes everywhere
    const Matrix mtx = multiply(transpose(m), x);

    const auto fit = [&](const Matrix& h) {
        return frobenius_norm_sq(subtract(x, multiply(m, h)));
    };

    Matrix h = h_init;
    Matrix y = h_init;
    Matrix best = h_init;
    double best_f = fit(h_init);
    double prev_f = best_f;
    double t = 1.0;
    for (std::size_t s = 0; s < inner_iter; ++s) {
        // gradient at the extrapolated point: 2 (M'M Y - M'X)
        Matrix grad = multiply(g, y);
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad.data()[i] = 2.0 * (grad.data()[i] - mtx.data()[i]);
        Matrix h_next = y;
        for (std::size_t i = 0; i < h_next.size(); ++i)
            h_next.data()[i] -= grad.data()[i] / lip;
        h_next = project_constraint(std::move(h_next), FactorSide::H, placement);

        const double f_next = fit(h_next);
        if (f_next < best_f) {
            best_f = f_next;
            best = h_next;
        }
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (f_next > prev_f) { // adaptive restart
            t = 1.0;
            t_next = 1.0;
        }
        y = h_next;
        const double mom = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < y.size(); ++i)
            y.data()[i] += mom * (h_next.data()[i] - h.data()[i]);
        h = std::move(h_next);
        t = t_next;
        prev_f = f_next;
    }
    return best;
}

/// Quadratic majorizer of the M-subproblem:
/// A = HH' + lambda (M0'M0 + delta I)^-1,  C = XH'.
inline std::pair<Matrix, Matrix> build_m_majorizer(const Matrix& x, const Matrix& h,
                                                   const Matrix& m0, double lambda,
                                                   double delta) {
    Matrix a = gram_of_rows(h);
    if (lambda != 0.0) {
        const Matrix inv = spd_inverse_shifted(gram_of_columns(m0), delta);
        for (std::size_t i = 0; i < a.size(); ++i)
            a.data()[i] += lambda * inv.data()[i];
    }
    Matrix c = multiply(x, transpose(h));
    return {std::move(a), std::move(c)};
}

namespace detail {

/// Row-separable quadratic sum_i (1/2 M(i,:) A M(i,:)' - C(i,:) M(i,:)').
inline double quadratic_value(const Matrix& m, const Matrix& a, const Matrix& c) {
    return 0.5 * dot(multiply(m, a), m) - dot(c, m);
}

} // namespace detail

/// Projected fast gradient on the strongly convex quadratic above, with the
/// constant momentum (sqrt(L)-sqrt(mu))/(sqrt(L)+sqrt(mu)) and step 1/L.
/// Returns the best iterate, start included.
inline Matrix update_m_pfgm(const Matrix& a, const Matrix& c, const Matrix& m_init,
                            ConstraintPlacement placement, std::size_t inner_iter) {
    if (a.rows() != a.cols() || c.cols() != a.rows() || m_init.cols() != a.rows() ||
        m_init.rows() != c.rows())
        throw ShapeMismatch("update_m_pfgm: nonconformable shapes");
    SpectralBounds sb;
    try {
        sb = spectral_bounds(a);
    } catch (const ConvergenceFailure&) {
        sb.l_max = trace(a);
        sb.l_min = 0.0;
    }
    const double lip = sb.l_max;
    if (lip <= 0.0) return m_init;
    const double mom = (std::sqrt(lip) - std::sqrt(sb.l_min)) /
                       (std::sqrt(lip) + std::sqrt(sb.l_min));

    Matrix m = m_init;
    Matrix y = m_init;
    Matrix best = m_init;
    double best_q = detail::quadratic_value(m_init, a, c);
    for (std::size_t s = 0; s < inner_iter; ++s) {
        Matrix grad = multiply(y, a);
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad.data()[i] -= c.data()[i];
        Matrix m_next = y;
        for (std::size_t i = 0; i < m_next.size(); ++i)
            m_next.data()[i] -= grad.data()[i] / lip;
        m_next = project_constraint(std::move(m_next), FactorSide::M, placement);

        const double q_next = detail::quadratic_value(m_next, a, c);
        if (q_next < best_q) {
            best_q = q_next;
            best = m_next;
        }
        y = m_next;
        for (std::size_t i = 0; i < y.size(); ++i)
            y.data()[i] += mom * (m_next.data()[i] - m.data()[i]);
        m = std::move(m_next);
    }
    return best;
}

/// fit + lambda logdet(M'M + delta I) (MinVol) or
/// fit - lambda logdet(M'M + delta I) (MaxVol).
inline double objective_value(const Matrix& x, const Matrix& m, const Matrix& h,
                              double lambda, double delta, VolumeSign sign) {
    const double fit = frobenius_norm_sq(subtract(x, multiply(m, h)));
    if (lambda == 0.0) return fit;
    const double ld = logdet_shifted_gram(gram_of_columns(m), delta);
    return sign == VolumeSign::MinVol ? fit + lambda * ld : fit - lambda * ld;
}

/// Alternating solver for
///   min ||X - MH||_F^2 + lambda logdet(M'M + delta I)
/// under the configured placement: a fast-gradient pass on the H least
/// squares, then a fast-gradient pass on the logdet majorizer in M. The
/// first-order Taylor surrogate of the concave logdet touches the objective
/// at the current M, so each round is non-increasing by construction; the
/// returned factors are the best recorded iterate.
inline SolveResult solve_volreg(const Matrix& x, const SolverConfig& config,
                                std::optional<std::pair<Matrix, Matrix>> provided = {}) {
    if (config.k < 1 || config.k > std::min(x.rows(), x.cols()))
        throw ShapeMismatch("rank k must satisfy 1 <= k <= min(rows, cols)");
    if (!(config.delta > 0.0) || config.lambda_prime < 0.0 || config.max_outer < 1 ||
        config.inner_iter < 1)
        throw Error("invalid solver configuration");

    Matrix m, h;
    if (config.init == InitMode::ProvidedFactors || provided.has_value()) {
        if (!provided.has_value())
            throw Error("ProvidedFactors init requires factors");
        m = project_constraint(provided->first, FactorSide::M, config.placement);
        h = project_constraint(provided->second, FactorSide::H, config.placement);
        if (m.rows() != x.rows() || m.cols() != config.k || h.rows() != config.k ||
            h.cols() != x.cols())
            throw ShapeMismatch("provided factors do not conform to X and k");
    } else {
        auto [m0, h0] = init_factors(x, config.k, config.seed, config.placement);
        m = std::move(m0);
        h = std::move(h0);
    }

    SolveResult result;
    try {
        result.lambda = compute_lambda(x, m, h, config.lambda_prime, config.delta);
    } catch (const DegenerateScale&) {
        // denominator collapsed: fall back to the raw fit scale
        result.lambda =
            config.lambda_prime * frobenius_norm_sq(subtract(x, multiply(m, h)));
        result.degenerate_scale = true;
    }
    const double lambda = result.lambda;
    const double delta = config.delta;

    const auto record = [&](const Matrix& mm, const Matrix& hh) {
        const double fit = frobenius_norm_sq(subtract(x, multiply(mm, hh)));
        const double vol_m = logdet_shifted_gram(gram_of_columns(mm), delta);
        const double vol_h = logdet_shifted_gram(gram_of_rows(hh), delta);
        result.fit_history.push_back(fit);
        result.volume_history.push_back(vol_m);
        result.volume_history_h.push_back(vol_h);
        result.objective_history.push_back(fit + lambda * vol_m);
    };

    record(m, h);
    Matrix best_m = m;
    Matrix best_h = h;
    double best_obj = result.objective_history.back();

    for (std::size_t t = 1; t <= config.max_outer; ++t) {
        h = update_h_pfgm(x, m, h, config.placement, config.inner_iter);
        auto [a, c] = build_m_majorizer(x, h, m, lambda, delta);
        m = update_m_pfgm(a, c, m, config.placement, config.inner_iter);

        record(m, h);
        result.iterations_run = t;
        const double obj = result.objective_history.back();
        if (obj < best_obj) {
            best_obj = obj;
            best_m = m;
            best_h = h;
        }
        const double prev = result.objective_history[result.objective_history.size() - 2];
        if (std::abs(prev - obj) / std::max(std::abs(obj), 1.0) < config.tol_objective) {
            result.converged = true;
            break;
        }
    }

    result.m = std::move(best_m);
    result.h = std::move(best_h);
    return result;
}

/// Minimum-volume-constrained solve: the regularizer shrinks
/// logdet(M'M + delta I), pulling the basis toward the data.
inline SolveResult solve_mvc(const Matrix& x, const SolverConfig& config) {
    return solve_volreg(x, config);
}

namespace detail {

/// Constraint placement for the transposed problem: with X' = M_t H_t,
/// M_t = H' and H_t = M', a constraint on one factor's rows/columns becomes
/// the mirrored constraint on the other factor's columns/rows.
inline ConstraintPlacement transpose_placement(ConstraintPlacement p) {
    switch (p) {
        case ConstraintPlacement::HColsSumOne: return ConstraintPlacement::MRowsSumOne;
        case ConstraintPlacement::HRowsSumOne: return ConstraintPlacement::MColsSumOne;
        case ConstraintPlacement::MColsSumOne: return ConstraintPlacement::HRowsSumOne;
        case ConstraintPlacement::MRowsSumOne: return ConstraintPlacement::HColsSumOne;
        case ConstraintPlacement::NonnegOnly: return ConstraintPlacement::NonnegOnly;
    }
    return ConstraintPlacement::NonnegOnly;
}

} // namespace detail

/// Maximum-volume-constrained solve. Maximizing det(M'M) is equivalent to
/// minimizing det(HH'), so the solve runs the minimum-volume machinery on X'
/// (where the roles of the factors swap) and de-transposes the result:
/// M = H_t', H = M_t'. Volume histories are swapped accordingly so
/// volume_history again reports logdet(M'M + delta I) of the returned M.
inline SolveResult solve_mav(const Matrix& x, const SolverConfig& config) {
    SolverConfig tcfg = config;
    tcfg.placement = detail::transpose_placement(config.placement);
    SolveResult r = solve_volreg(transpose(x), tcfg);
    SolveResult out;
    out.m = transpose(r.h);
    out.h = transpose(r.m);
    out.lambda = r.lambda;
    out.objective_history = std::move(r.objective_history);
    out.fit_history = std::move(r.fit_history);
    out.volume_history = std::move(r.volume_history_h);
    out.volume_history_h = std::move(r.volume_history);
    out.iterations_run = r.iterations_run;
    out.converged = r.converged;
    out.degenerate_scale = r.degenerate_scale;
    return out;
}

} // namespace volnmf
