#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "test_support.hpp"
#include "volnmf/datagen.hpp"

using namespace volnmf;

TEST_CASE("sample_dirichlet draws sum to one") {
    Rng rng(71);
    for (int rep = 0; rep < 100; ++rep) {
        const auto d = sample_dirichlet({2.0, 0.5, 0.5}, rng);
        double sum = 0.0;
        for (double v : d) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("sample_dirichlet empirical means match alpha_i / sum(alpha)") {
    Rng rng(72);
    const int n = 50000;

    std::vector<double> mean_uniform(3, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto d = sample_dirichlet({1.0, 1.0, 1.0}, rng);
        for (int c = 0; c < 3; ++c) mean_uniform[c] += d[c] / n;
    }
    for (int c = 0; c < 3; ++c)
        CHECK(mean_uniform[c] == Catch::Approx(1.0 / 3.0).margin(0.01));

    std::vector<double> mean_skew(3, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto d = sample_dirichlet({2.0, 0.5, 0.5}, rng);
        for (int c = 0; c < 3; ++c) mean_skew[c] += d[c] / n;
    }
    CHECK(mean_skew[0] == Catch::Approx(2.0 / 3.0).margin(0.01));
    CHECK(mean_skew[1] == Catch::Approx(1.0 / 6.0).margin(0.01));
    CHECK(mean_skew[2] == Catch::Approx(1.0 / 6.0).margin(0.01));
}

TEST_CASE("rejection sampling respects the cap") {
    RejectionStats stats;
    const Matrix h = sample_coeffs_rejection({2.0, 2.0, 2.0}, 0.75, 500, 5, &stats);
    CHECK(h.rows() == 3);
    CHECK(h.cols() == 500);
    for (double v : h.values()) CHECK(v <= 0.75);
    for (std::size_t j = 0; j < h.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < h.rows(); ++i) sum += h(i, j);
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK(stats.accepted == 500);
    CHECK(stats.proposals >= stats.accepted);
}

TEST_CASE("cap of one never rejects") {
    RejectionStats stats;
    const Matrix a = sample_coeffs_rejection({2.0, 0.5, 0.5}, 1.0, 50, 9, &stats);
    CHECK(stats.proposals == 50);

    // identical stream to unrejected sampling with the same seed
    Rng rng(9);
    for (std::size_t j = 0; j < 50; ++j) {
        const auto d = sample_dirichlet({2.0, 0.5, 0.5}, rng);
        for (int i = 0; i < 3; ++i) CHECK(a(i, j) == d[i]);
    }
}

TEST_CASE("acceptance rate matches an independent Monte Carlo estimate") {
    RejectionStats stats;
    sample_coeffs_rejection({2.0, 2.0, 2.0}, 0.75, 500, 5, &stats);
    const double p1 = stats.acceptance_rate();
    const double n1 = static_cast<double>(stats.proposals);

    Rng rng(606060);
    const int n2 = 20000;
    int hits = 0;
    for (int i = 0; i < n2; ++i) {
        const auto d = sample_dirichlet({2.0, 2.0, 2.0}, rng);
        bool ok = true;
        for (double v : d)
            if (v > 0.75) ok = false;
        if (ok) ++hits;
    }
    const double p2 = static_cast<double>(hits) / n2;
    const double se =
        std::sqrt(p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2);
    CHECK(std::abs(p1 - p2) <= 3.0 * se);
}

TEST_CASE("scattered block construction") {
    const Matrix b0 = build_ssc_basis_block(3, 0.0);
    CHECK(b0.rows() == 6);
    for (std::size_t r = 0; r < 6; ++r) {
        double sum = 0.0;
        for (int c = 0; c < 3; ++c) sum += b0(r, c);
        CHECK(sum == 1.0);
    }
    CHECK(ssc_check_exact_k3(b0).ssc1 == SSCVerdict::Holds);

    const Matrix b1 = build_ssc_basis_block(3, 0.1);
    CHECK(ssc_check_exact_k3(b1).ssc1 == SSCVerdict::Holds);

    CHECK_THROWS_AS(build_ssc_basis_block(4, 0.1), ShapeMismatch);
    CHECK_THROWS_AS(build_ssc_basis_block(3, 0.6), Error);
}

TEST_CASE("constructor and checker agree at extreme beta") {
    // the constructor never hands out a block the checker rejects
    const double beta = 0.45;
    bool constructed = false;
    try {
        const Matrix b = build_ssc_basis_block(3, beta);
        constructed = true;
        CHECK(ssc_check_exact_k3(b).ssc1 == SSCVerdict::Holds);
    } catch (const SSCConstructionFailed&) {
        Matrix raw(6, 3);
        std::size_t r = 0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                raw(r, i) = 1.0 - beta;
                raw(r, j) = beta;
                ++r;
            }
        CHECK(ssc_check_exact_k3(raw).ssc1 == SSCVerdict::Violated);
    }
    INFO("beta=0.45 constructed=" << constructed);
}

TEST_CASE("generate_synthetic contracts") {
    SyntheticSpec spec;
    spec.setting = SyntheticSetting::ThreeDenseRows;
    spec.seed = 13;
    const Dataset d = generate_synthetic(spec);
    CHECK(d.x.rows() == 9);
    CHECK(d.x.cols() == 500);
    REQUIRE(d.m_true.has_value());
    REQUIRE(d.h_true.has_value());
    CHECK(d.m_true->rows() == 9);
    CHECK(d.m_true->cols() == 3);
    CHECK(d.h_true->rows() == 3);
    CHECK(d.h_true->cols() == 500);

    // noiseless by construction
    CHECK(d.x == multiply(*d.m_true, *d.h_true));
    for (double v : d.x.values()) CHECK(v >= 0.0);
    for (std::size_t j = 0; j < d.h_true->cols(); ++j) {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) sum += (*d.h_true)(i, j);
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }
    for (double v : d.h_true->values()) CHECK(v <= 0.75);

    const Dataset d2 = generate_synthetic(spec);
    CHECK(d2.x == d.x);
}

TEST_CASE("one-dense-row setting concentrates mass in the first row") {
    SyntheticSpec spec;
    spec.setting = SyntheticSetting::OneDenseRow;
    spec.seed = 17;
    const Dataset d = generate_synthetic(spec);
    const Matrix& h = *d.h_true;
    double min_row1 = 1.0, min_row2 = 1.0, min_row3 = 1.0;
    for (std::size_t j = 0; j < h.cols(); ++j) {
        min_row1 = std::min(min_row1, h(0, j));
        min_row2 = std::min(min_row2, h(1, j));
        min_row3 = std::min(min_row3, h(2, j));
    }
    CHECK(min_row1 > 0.01);
    CHECK(min_row2 < 0.05);
    CHECK(min_row3 < 0.05);
}

TEST_CASE("bundled time-allocation table") {
    const Dataset d = load_time_allocation();
    CHECK(d.x.rows() == 18);
    CHECK(d.x.cols() == 30);
    REQUIRE(d.row_labels.size() == 18);
    REQUIRE(d.col_labels.size() == 30);
    CHECK(d.row_labels[0] == "paidwork");
    CHECK(d.row_labels[6] == "sleeping");
    CHECK(d.col_labels[0] == "M1275");
    CHECK(d.col_labels[27] == "F6575");

    CHECK(d.x(0, 0) == 901.0);   // (paidwork, M1275)
    CHECK(d.x(6, 27) == 3849.0); // (sleeping, F6575)

    for (double v : d.x.values()) {
        CHECK(v > 0.0);
        CHECK(v == std::floor(v));
    }

    // column sums sit in a narrow band
    double lo = 1e300, hi = 0.0;
    for (std::size_t j = 0; j < d.x.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < d.x.rows(); ++i) sum += d.x(i, j);
        lo = std::min(lo, sum);
        hi = std::max(hi, sum);
    }
    CHECK(hi / lo < 1.02);
}

TEST_CASE("normalize_columns") {
    const Dataset d = load_time_allocation();
    const Matrix n = normalize_columns(d.x);
    for (std::size_t j = 0; j < n.cols(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n.rows(); ++i) sum += n(i, j);
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    }

    // idempotent on already-normalized input
    const Matrix n2 = normalize_columns(n);
    for (std::size_t i = 0; i < n.size(); ++i)
        CHECK(n2.data()[i] == Catch::Approx(n.data()[i]).margin(1e-15));

    // direct division check on the first column
    double col_sum = 0.0;
    for (std::size_t i = 0; i < d.x.rows(); ++i) col_sum += d.x(i, 0);
    CHECK(n(0, 0) == Catch::Approx(901.0 / col_sum).epsilon(1e-14));

    // row mean of the normalized table, first row, to 4 decimals
    double row_mean = 0.0;
    for (std::size_t j = 0; j < n.cols(); ++j) row_mean += n(0, j);
    row_mean /= 30.0;
    CHECK(std::round(row_mean * 1e4) / 1e4 == 0.0803);

    Matrix with_zero(2, 2);
    with_zero(0, 0) = 1.0;
    CHECK_THROWS_AS(normalize_columns(with_zero), ZeroColumn);
}

TEST_CASE("csv round trip is exact") {
    Rng rng(73);
    Dataset d;
    d.x = test_support::rand_matrix(rng, 7, 5, -10.0, 10.0);
    // exercise awkward magnitudes
    d.x(0, 0) = 1e-17;
    d.x(1, 1) = 98765432.123456789;
    d.x(2, 2) = 0.1;
    d.row_labels = {"r1", "r2", "r3", "r4", "r5", "r6", "r7"};
    d.col_labels = {"a", "b", "c", "d", "e"};

    const auto path = std::filesystem::temp_directory_path() / "volnmf_roundtrip.csv";
    write_csv(d, path);
    const Dataset back = load_csv(path);
    CHECK(back.x == d.x);
    CHECK(back.row_labels == d.row_labels);
    CHECK(back.col_labels == d.col_labels);
    std::filesystem::remove(path);
}

TEST_CASE("csv corner cases") {
    const Dataset one = load_csv_text("5.0");
    CHECK(one.x.rows() == 1);
    CHECK(one.x.cols() == 1);
    CHECK(one.x(0, 0) == 5.0);

    CHECK_THROWS_AS(load_csv_text("1,2,3\n4,5\n"), RaggedRows);
    try {
        load_csv_text("1,2,3\n4,5\n", "bad.csv");
    } catch (const RaggedRows& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    CHECK_THROWS_AS(load_csv_text("1,2\n3,oops\n"), ParseError);

    // headerless, label-free numeric block
    const Dataset plain = load_csv_text("1,2\n3,4\n");
    CHECK(plain.x == Matrix{{1.0, 2.0}, {3.0, 4.0}});
    CHECK(plain.row_labels.empty());
    CHECK(plain.col_labels.empty());
}
