#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "volnmf/datagen.hpp"
#include "volnmf/geometry.hpp"

using namespace volnmf;
using test_support::rand_matrix;

namespace {

// Independent simplex projection: bisection on the threshold tau with
// g(tau) = sum(max(v - tau, 0)) - 1, monotone in tau. No sorting involved.
std::vector<double> project_simplex_bisection(const std::vector<double>& v) {
    double lo = *std::min_element(v.begin(), v.end()) - 1.0;
    double hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double x : v) s += std::max(x - mid, 0.0);
        (s > 1.0 ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - tau, 0.0);
    return w;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::vector<double> rand_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = lo + (hi - lo) * rng.uniform01();
    return v;
}

// Uniform point on the simplex via normalized exponentials.
std::vector<double> rand_simplex_point(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    double sum = 0.0;
    for (auto& x : v) {
        x = -std::log(rng.uniform01_open());
        sum += x;
    }
    for (auto& x : v) x /= sum;
    return v;
}

bool is_ssc1_violation_witness(const Matrix& m, const std::vector<double>& y) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * y[j];
        if (s < -1e-10) return false;
    }
    double sum = 0.0, norm_sq = 0.0;
    for (double v : y) {
        sum += v;
        norm_sq += v * v;
    }
    return sum < std::sqrt(norm_sq) - 1e-10;
}

} // namespace

TEST_CASE("simplex projection on easy points") {
    CHECK(project_simplex_vector({0.2, 0.3, 0.5}) == std::vector<double>{0.2, 0.3, 0.5});
    CHECK(project_simplex_vector({2.0, 0.0, 0.0}) == std::vector<double>{1.0, 0.0, 0.0});
    const auto u = project_simplex_vector({0.5, 0.5, 0.5});
    for (double x : u) CHECK(x == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("simplex projection output sums to one") {
    Rng rng(41);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rep % 7;
        const auto p = project_simplex_vector(rand_vec(rng, n, -3.0, 3.0));
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("simplex projection matches the bisection oracle") {
    Rng rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rep % 5;
        const auto v = rand_vec(rng, n, -2.0, 2.0);
        CHECK(dist2(project_simplex_vector(v), project_simplex_bisection(v)) < 1e-9);
    }
}

TEST_CASE("simplex projection matches a dense grid search in low dimension") {
    Rng rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        const auto v = rand_vec(rng, 3, -1.5, 1.5);
        const auto p = project_simplex_vector(v);
        double best = 1e30;
        std::vector<double> w(3);
        const int steps = 1000;
        for (int a = 0; a <= steps; ++a)
            for (int b = 0; b <= steps - a; ++b) {
                w[0] = a / 1000.0;
                w[1] = b / 1000.0;
                w[2] = 1.0 - w[0] - w[1];
                best = std::min(best, dist2(w, v));
            }
        CHECK(dist2(p, v) <= best + 2e-3);
        CHECK(std::abs(dist2(p, v) - best) < 2e-3);
    }
}

TEST_CASE("simplex projection is idempotent") {
    Rng rng(44);
    for (int rep = 0; rep < 100; ++rep) {
        const auto p = project_simplex_vector(rand_vec(rng, 2 + rep % 5, -2.0, 2.0));
        CHECK(project_simplex_vector(p) == p);
    }
}

TEST_CASE("simplex projection optimality against random feasible points") {
    Rng rng(45);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 2 + rep % 5;
        const auto v = rand_vec(rng, n, -2.0, 2.0);
        const auto p = project_simplex_vector(v);
        const auto w = rand_simplex_point(rng, n);
        CHECK(dist2(p, v) <= dist2(w, v) + 1e-12);
    }
}

TEST_CASE("project_constraint routes to the right axis") {
    // feasible H columns stay put
    Matrix h{{0.2, 1.0, 0.0}, {0.8, 0.0, 1.0}};
    const Matrix hp = project_constraint(h, FactorSide::H, ConstraintPlacement::HColsSumOne);
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(hp.data()[i] == Catch::Approx(h.data()[i]).margin(1e-14));

    Matrix m{{2.0, 0.0}, {0.0, 3.0}};
    const Matrix mp = project_constraint(m, FactorSide::M, ConstraintPlacement::MRowsSumOne);
    CHECK(mp == Matrix{{1.0, 0.0}, {0.0, 1.0}});

    Rng rng(46);
    Matrix a = rand_matrix(rng, 4, 5, -1.0, 1.0);
    const Matrix ap = project_constraint(a, FactorSide::M, ConstraintPlacement::NonnegOnly);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(ap.data()[i] == std::max(a.data()[i], 0.0));

    // placement naming the other factor degrades to nonnegative clipping
    const Matrix hp2 = project_constraint(a, FactorSide::H, ConstraintPlacement::MRowsSumOne);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(hp2.data()[i] == std::max(a.data()[i], 0.0));
}

TEST_CASE("exact SSC check accepts the identity basis") {
    const auto report = ssc_check_exact_k3(identity(3));
    CHECK(report.ssc1 == SSCVerdict::Holds);
    CHECK(report.ssc2 == SSCVerdict::Holds);
    CHECK(!report.certificate.has_value());
}

TEST_CASE("exact SSC check rejects strictly positive rows with a witness") {
    Rng rng(47);
    std::vector<double> alpha = {5.0, 5.0, 5.0};
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) {
        const auto row = sample_dirichlet(alpha, rng);
        for (int j = 0; j < 3; ++j) m(i, j) = row[j];
    }
    const auto report = ssc_check_exact_k3(m);
    CHECK(report.ssc1 == SSCVerdict::Violated);
    REQUIRE(report.certificate.has_value());
    CHECK(is_ssc1_violation_witness(m, *report.certificate));
}

TEST_CASE("exact SSC check accepts the scattered block") {
    const Matrix block = build_ssc_basis_block(3, 0.1);
    const auto report = ssc_check_exact_k3(block);
    CHECK(report.ssc1 == SSCVerdict::Holds);
}

TEST_CASE("exact SSC check rejects rank-deficient input") {
    Matrix m(4, 3);
    for (int i = 0; i < 4; ++i) {
        m(i, 0) = 1.0 + i;
        m(i, 1) = 2.0 * (1.0 + i);
        m(i, 2) = 0.5 * (1.0 + i);
    }
    CHECK_THROWS_AS(ssc_check_exact_k3(m), RankDeficient);
}

TEST_CASE("sampling SSC check on the orthant and on a flat cone") {
    const auto ok = ssc_check_sampling(identity(4), 10000, 7);
    CHECK(ok.ssc1 == SSCVerdict::ProbablyHolds);
    CHECK(ok.ssc2 == SSCVerdict::NotChecked);

    Matrix flat(4, 4, 0.25); // every row = 1'/K: rank 1
    const auto bad = ssc_check_sampling(flat, 10000, 7);
    CHECK(bad.ssc1 == SSCVerdict::Violated);
    REQUIRE(bad.certificate.has_value());
    CHECK(is_ssc1_violation_witness(flat, *bad.certificate));
}

TEST_CASE("sampling SSC check agrees with the exact one on the block") {
    const Matrix block = build_ssc_basis_block(3, 0.1);
    const auto report = ssc_check_sampling(block, 10000, 99);
    CHECK(report.ssc1 == SSCVerdict::ProbablyHolds);
}

TEST_CASE("identity bases of all sizes probably hold") {
    for (std::size_t k = 2; k <= 6; ++k) {
        const auto report = ssc_check_sampling(identity(k), 5000, 13);
        CHECK(report.ssc1 == SSCVerdict::ProbablyHolds);
    }
}

TEST_CASE("exact and sampling checkers never disagree in direction") {
    Rng rng(48);
    int holds_seen = 0, violated_seen = 0;
    for (int rep = 0; rep < 50; ++rep) {
        Matrix m(6, 3);
        if (rep % 2 == 0) {
            // scattered-block shape with mild noise: usually holds
            const Matrix block = build_ssc_basis_block(3, 0.05 + 0.3 * rng.uniform01());
            m = block;
            for (std::size_t i = 0; i < m.size(); ++i)
                m.data()[i] = std::max(m.data()[i] + 0.02 * (rng.uniform01() - 0.5), 0.0);
        } else {
            // dense positive rows: usually violated
            m = rand_matrix(rng, 6, 3, 0.05, 1.0);
        }
        SSCReport exact;
        try {
            exact = ssc_check_exact_k3(m);
        } catch (const RankDeficient&) {
            continue;
        }
        const auto sampled = ssc_check_sampling(m, 2000, 1000 + rep);
        if (exact.ssc1 == SSCVerdict::Holds) {
            ++holds_seen;
            CHECK(sampled.ssc1 != SSCVerdict::Violated);
        }
        if (sampled.ssc1 == SSCVerdict::Violated) {
            ++violated_seen;
            CHECK(exact.ssc1 == SSCVerdict::Violated);
            CHECK(is_ssc1_violation_witness(m, *sampled.certificate));
        }
    }
    CHECK(holds_seen > 0);
    CHECK(violated_seen > 0);
}
