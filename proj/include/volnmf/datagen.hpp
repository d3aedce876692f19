#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "volnmf/csv.hpp"
#include "volnmf/dataset.hpp"
#include "volnmf/errors.hpp"
#include "volnmf/geometry.hpp"
#include "volnmf/matrix.hpp"
#include "volnmf/rng.hpp"

namespace volnmf {

/// The three coefficient-sampling regimes: the Dirichlet concentration
/// controls how many rows of H stay bounded away from zero.
enum class SyntheticSetting {
    OneDenseRow,    // alpha = (2, 0.5, 0.5)
    TwoDenseRows,   // alpha = (2, 2, 0.5)
    ThreeDenseRows, // alpha = (2, 2, 2)
};

inline std::vector<double> setting_alpha(SyntheticSetting s) {
    switch (s) {
        case SyntheticSetting::OneDenseRow: return {2.0, 0.5, 0.5};
        case SyntheticSetting::TwoDenseRows: return {2.0, 2.0, 0.5};
        case SyntheticSetting::ThreeDenseRows: return {2.0, 2.0, 2.0};
    }
    return {};
}

struct SyntheticSpec {
    SyntheticSetting setting = SyntheticSetting::ThreeDenseRows;
    std::size_t i = 9;
    std::size_t j = 500;
    std::size_t k = 3;
    double cap = 0.75;   // rejection ceiling on coefficient entries
    double beta = 0.1;   // mixing weight of the scattered basis block
    std::uint64_t seed = 0;
};

/// One Dirichlet(alpha) draw via normalized Gamma variates.
inline std::vector<double> sample_dirichlet(const std::vector<double>& alpha, Rng& rng) {
    for (double a : alpha)
        if (!(a > 0.0)) throw Error("Dirichlet parameters must be positive");
    std::vector<double> g(alpha.size());
    for (;;) {
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            g[i] = rng.gamma(alpha[i]);
            sum += g[i];
        }
        if (sum > 1e-300) {
            for (auto& v : g) v /= sum;
            return g;
        }
    }
}

struct RejectionStats {
    std::size_t proposals = 0;
    std::size_t accepted = 0;
    double acceptance_rate() const {
        return proposals == 0 ? 0.0
                              : static_cast<double>(accepted) /
                                    static_cast<double>(proposals);
    }
};

/// K x j matrix of Dirichlet columns, each column resampled in full until
/// every entry is <= cap. With cap = 1 no draw is ever rejected, so the
/// stream is identical to unrejected sampling for the same seed.
inline Matrix sample_coeffs_rejection(const std::vector<double>& alpha, double cap,
                                      std::size_t j, std::uint64_t seed,
                                      RejectionStats* stats = nullptr) {
    if (!(cap * static_cast<double>(alpha.size()) > 1.0))
        throw Error("cap * K must exceed 1 or no column can be feasible");
    Rng rng(seed);
    Matrix h(alpha.size(), j);
    RejectionStats local;
    std::size_t consecutive_rejections = 0;
    for (std::size_t col = 0; col < j; ++col) {
        for (;;) {
            const std::vector<double> d = sample_dirichlet(alpha, rng);
            ++local.proposals;
            bool ok = true;
            for (double v : d)
                if (v > cap) ok = false;
            if (ok) {
                consecutive_rejections = 0;
                ++local.accepted;
                for (std::size_t r = 0; r < alpha.size(); ++r) h(r, col) = d[r];
                break;
            }
            if (++consecutive_rejections >= 1000000)
                throw RejectionStall("10^6 consecutive rejections; cap is infeasible");
        }
    }
    if (stats) *stats = local;
    return h;
}

/// The 6x3 scattered block: rows (1-beta) e_i + beta e_j over ordered pairs
/// i != j. The construction is validated by the exact checker before being
/// released, so generator and checker cannot silently disagree.
inline Matrix build_ssc_basis_block(std::size_t k, double beta) {
    if (k != 3) throw ShapeMismatch("scattered block construction is defined for k = 3");
    if (beta < 0.0 || beta >= 0.5) throw Error("beta must lie in [0, 0.5)");
    Matrix block(6, 3);
    std::size_t r = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) continue;
            block(r, i) = 1.0 - beta;
            block(r, j) = beta;
            ++r;
        }
    const SSCReport report = ssc_check_exact_k3(block);
    if (report.ssc1 != SSCVerdict::Holds)
        throw SSCConstructionFailed("scattered block failed the exact check");
    return block;
}

/// Noiseless synthetic dataset: M stacks an (i-6) x 3 uniform(0,1) block on
/// the scattered block, H is capped-Dirichlet with unit column sums, and
/// X = M H exactly. Fully determined by the spec (seed included).
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.k != 3) throw ShapeMismatch("synthetic settings are defined for k = 3");
    if (spec.i < 7) throw ShapeMismatch("need i >= 7 (at least one uniform row)");
    if (!(spec.cap > 0.0 && spec.cap < 1.0) && spec.cap != 1.0)
        throw Error("cap must lie in (0, 1]");

    Rng rng(spec.seed);
    const std::size_t top = spec.i - 6;
    Matrix m(spec.i, 3);
    for (std::size_t r = 0; r < top; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = rng.uniform01();
    const Matrix block = build_ssc_basis_block(3, spec.beta);
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(top + r, c) = block(r, c);

    const Matrix h = sample_coeffs_rejection(setting_alpha(spec.setting), spec.cap,
                                             spec.j, derive_seed(spec.seed, 1));
    Dataset d;
    d.x = multiply(m, h);
    d.m_true = std::move(m);
    d.h_true = h;
    return d;
}

namespace detail {

// 18 activities x 30 demographic groups; entries are minutes per week.
inline constexpr const char* kTimeAllocationCsv =
    ",M1275,M1280,M1285,M2575,M2580,M2585,M3575,M3580,M3585,M5075,M5080,M5085,M6575,M6580,M6585,F1275,F1280,F1285,F2575,F2580,F2585,F3575,F3580,F3585,F5075,F5080,F5085,F6575,F6580,F6585\n"
    "paidwork,901,769,707,2180,1992,1899,1901,2008,2093,1708,1357,1206,176,71,95,723,665,564,439,471,704,299,375,412,151,153,233,11,6,19\n"
    "dom.work,87,157,155,250,269,341,249,289,331,244,337,450,617,563,636,494,460,397,1342,1338,1147,1567,1605,1529,1600,1558,1487,1319,1409,1318\n"
    "caring,33,28,15,194,206,184,99,128,136,51,54,25,124,27,38,135,99,86,635,673,651,296,309,308,83,84,82,78,154,44\n"
    "shopping,120,138,127,152,157,183,173,157,185,227,221,230,273,251,264,208,200,223,347,336,336,372,347,373,376,335,352,384,292,320\n"
    "per.need,289,294,316,293,316,302,351,339,332,350,364,352,365,392,383,359,377,387,311,339,337,325,346,351,367,368,385,372,453,366\n"
    "eating,508,528,527,623,649,605,660,709,650,709,744,686,763,767,707,536,513,495,593,607,572,664,633,656,601,613,595,635,665,615\n"
    "sleeping,3737,3765,3744,3380,3403,3397,3463,3445,3347,3560,3569,3533,3801,3871,3694,3744,3777,3821,3526,3532,3447,3567,3554,3444,3673,3701,3566,3849,3713,3675\n"
    "educat.,1447,1455,1537,124,245,208,56,90,85,18,58,46,10,43,54,1163,1321,1436,77,115,120,104,98,68,27,30,40,6,21,23\n"
    "particip,128,101,92,129,126,143,195,156,148,122,207,272,159,192,214,125,88,80,85,115,115,133,143,196,195,179,195,108,124,139\n"
    "soc.cont,515,505,449,609,649,599,671,593,479,603,704,554,811,671,619,592,557,527,780,776,736,694,689,699,758,810,721,929,796,749\n"
    "goingout,490,396,441,382,321,391,360,240,336,237,279,264,213,220,274,364,400,396,316,270,303,225,229,277,255,212,268,219,187,202\n"
    "sports,419,436,485,269,279,271,206,280,291,209,299,316,297,403,476,348,370,352,306,352,368,335,440,453,323,504,545,297,482,579\n"
    "gardening,111,102,100,173,213,231,259,238,268,256,288,309,366,312,308,90,76,86,149,131,145,198,154,170,197,190,217,169,191,169\n"
    "outside,48,41,64,69,35,67,88,45,64,116,76,112,86,117,178,32,32,41,41,32,44,37,34,45,53,41,76,37,39,52\n"
    "tv-radio,752,815,860,700,671,812,785,804,812,921,862,1012,1161,1198,1233,594,581,702,547,497,565,622,576,582,710,644,708,888,860,1076\n"
    "reading,272,256,188,366,318,243,316,343,319,468,413,467,477,660,578,292,257,207,300,275,265,356,311,307,478,390,377,485,404,460\n"
    "relaxing,78,56,73,64,58,57,59,44,58,79,57,68,157,92,104,73,74,63,88,54,63,76,63,59,78,53,64,63,67,69\n"
    "other,146,240,200,124,172,148,188,170,146,203,190,174,223,230,225,208,234,214,199,167,164,207,174,153,154,212,170,230,216,204\n";

// Sum of all entries, verified at load time against the embedded text.
inline constexpr double kTimeAllocationTotal = 302390.0;

} // namespace detail

/// The bundled 18 x 30 time-allocation dataset, exactly as shipped, with
/// activity row labels and demographic column labels.
inline Dataset load_time_allocation() {
    Dataset d = load_csv_text(detail::kTimeAllocationCsv, "time_allocation");
    if (d.x.rows() != 18 || d.x.cols() != 30)
        throw Error("embedded time-allocation table has the wrong shape");
    double total = 0.0;
    for (double v : d.x.values()) total += v;
    if (total != detail::kTimeAllocationTotal)
        throw Error("embedded time-allocation table failed its checksum");
    return d;
}

/// Divide every column by its sum. Errors on a column with sum <= 0.
inline Matrix normalize_columns(const Matrix& x) {
    Matrix out = x;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
        if (!(sum > 0.0))
            throw ZeroColumn("column " + std::to_string(c + 1) + " has nonpositive sum");
        for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = x(r, c) / sum;
    }
    return out;
}

} // namespace volnmf
