#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rvwalk/error.hpp"
#include "rvwalk/moment_oracle.hpp"
#include "test_support.hpp"

using namespace rvwalk;
using rvwalk::testing::Q;

TEST_CASE("second moment at n = 2") {
    for (double p : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        auto mt = second_moments(MemorySpec::power_law(0.0), p, 2);
        CHECK(mt.E_S_sq_at(2) == doctest::Approx(2.0 + 2.0 * p).epsilon(1e-15));
        auto ex = enumerate_exact(MemorySpec::power_law(0.0), p, 2, FiniteLaw::rademacher());
        CHECK(ex.E_S_sq[1] == doctest::Approx(2.0 + 2.0 * p).epsilon(1e-15));
    }
    CHECK(second_moments(MemorySpec::power_law(0.0), 0.5, 2).E_S_sq_at(2) == 3.0);
}

TEST_CASE("martingale second moment at n = 2") {
    // a_2 = 1/(1+p), M_2 = a_2 (X_1 + X_2) with mu = 1
    Q p{1, 2};
    Q a2 = Q{1} / (Q{1} + p);
    Q expect = a2 * a2 * (Q{2} + Q{2} * p);
    CHECK(expect == Q{4, 3});
    auto mt = second_moments(MemorySpec::power_law(0.0), 0.5, 2);
    CHECK(mt.E_M_sq_at(2) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    auto ex = enumerate_exact(MemorySpec::power_law(0.0), 0.5, 2, FiniteLaw::rademacher());
    CHECK(ex.E_M_sq[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("first step") {
    auto mt = rademacher_fourth_moments(MemorySpec::continued_product(1.0), 0.7, 1);
    CHECK(mt.E_S_sq_at(1) == 1.0);
    CHECK(mt.kurtosis_at(1) == doctest::Approx(1.0));
    CHECK(mt.b_n[0] == doctest::Approx(2.0));

    auto sq = rademacher_fourth_moments(MemorySpec::power_law(1.0), 0.4, 1);
    CHECK(sq.b_n[0] == doctest::Approx(2.0 * std::pow(sq.E_Y_sq[0], 2.0)));
}

TEST_CASE("p = 0 collapses to the i.i.d. walk") {
    auto spec = MemorySpec::power_law(0.5);
    auto mt = second_moments(spec, 0.0, 300);
    auto seq = build_sequences(spec, 0.0, 300);
    for (std::uint64_t n : {1u, 2u, 50u, 300u}) {
        CHECK(mt.E_S_sq_at(n) == doctest::Approx(double(n)).epsilon(1e-13));
        CHECK(mt.E_M_sq_at(n) == doctest::Approx(seq.v_sq_at(n)).epsilon(1e-13));
    }
}

TEST_CASE("recursions agree with enumeration") {
    struct Case {
        MemorySpec spec;
        double p;
        std::uint64_t n;
    };
    std::vector<Case> cases{
        {MemorySpec::continued_product(1.0), 0.5, 3},
        {MemorySpec::power_law(0.0), 0.3, 8},
        {MemorySpec::power_law(0.5), 0.75, 8},
        {MemorySpec::power_law(1.0), 0.9, 7},
        {MemorySpec::log_modulated(0.0, -1.0), 0.5, 6},
    };
    for (const auto& c : cases) {
        CAPTURE(c.spec.describe());
        CAPTURE(c.p);
        auto mt = rademacher_fourth_moments(c.spec, c.p, c.n);
        auto ex = enumerate_exact(c.spec, c.p, c.n, FiniteLaw::rademacher());
        for (std::uint64_t k = 1; k <= c.n; ++k) {
            CHECK(ex.E_S[k - 1] == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(mt.E_S_sq[k - 1] == doctest::Approx(ex.E_S_sq[k - 1]).epsilon(1e-12));
            CHECK(mt.E_M_sq[k - 1] == doctest::Approx(ex.E_M_sq[k - 1]).epsilon(1e-12));
            CHECK(mt.E_SY[k - 1] == doctest::Approx(ex.E_SY[k - 1]).epsilon(1e-12));
            CHECK(mt.E_Y_sq[k - 1] == doctest::Approx(ex.E_Y_sq[k - 1]).epsilon(1e-12));
            CHECK(mt.E_Y_4[k - 1] == doctest::Approx(ex.E_Y_4[k - 1]).epsilon(1e-12));
        }
    }
}

TEST_CASE("enumeration keeps the marginal law") {
    auto ex = enumerate_exact(MemorySpec::power_law(1.0), 0.6, 8, FiniteLaw::rademacher());
    REQUIRE(ex.marginal.size() == 8);
    for (const auto& m : ex.marginal) {
        CHECK(m[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(ex.nodes <= (1u << 8));
    CHECK(ex.expansions >= ex.nodes);

    FiniteLaw three{{-2.0, 0.0, 2.0}, {0.25, 0.5, 0.25}};
    CHECK(three.mean() == 0.0);
    CHECK(three.variance() == 2.0);
    auto e3 = enumerate_exact(MemorySpec::power_law(0.0), 0.5, 5, three);
    CHECK(e3.marginal[4][1] == doctest::Approx(0.5).epsilon(1e-12));
    auto m3 = second_moments(MemorySpec::power_law(0.0), 0.5, 5, 2.0);
    CHECK(e3.E_S_sq[4] == doctest::Approx(m3.E_S_sq_at(5)).epsilon(1e-12));
}

TEST_CASE("enumeration respects its node cap") {
    try {
        enumerate_exact(MemorySpec::power_law(1.0), 0.5, 12, FiniteLaw::rademacher(), 64);
        FAIL("expected resource limit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ResourceLimit);
    }
}

TEST_CASE("closed-form sums match the recursion") {
    for (double p : {0.25, 0.5, 0.8}) {
        auto seq = build_sequences(MemorySpec::power_law(0.5), p, 2000);
        auto mt = rademacher_fourth_moments(seq);
        auto cf = closed_form_E_S_sq(seq, mt);
        auto sb = solved_a4p_b(seq, mt);
        for (std::uint64_t n : {1u, 2u, 10u, 500u, 2000u}) {
            CHECK(cf[n - 1] == doctest::Approx(mt.E_S_sq_at(n)).epsilon(1e-10));
            CHECK(sb[n - 1] == doctest::Approx(std::exp(mt.log_a_4p[n - 1]) * mt.b_n[n - 1]).epsilon(1e-10));
        }
    }
}

TEST_CASE("structural invariants") {
    auto mt = rademacher_fourth_moments(MemorySpec::power_law(0.0), 0.9, 100000);
    for (std::uint64_t n = 1; n <= mt.n_max; ++n) {
        REQUIRE(mt.b_n[n - 1] >= 0.0);
        REQUIRE(mt.E_M_sq[n - 1] > 0.0);
        REQUIRE(mt.kurtosis_M[n - 1] < 3.0);
        if (n > 1) REQUIRE(mt.E_S_sq[n - 1] > mt.E_S_sq[n - 2]);
    }
}

TEST_CASE("subcritical variance ratio approaches its limit") {
    auto mt = second_moments(MemorySpec::power_law(0.0), 0.25, 1000000);
    CHECK(mt.E_S_sq_at(1000000) / 1e6 == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("csv output") {
    auto mt = rademacher_fourth_moments(MemorySpec::power_law(0.0), 0.5, 5);
    std::ostringstream os;
    mt.write_csv(os);
    std::istringstream is(os.str());
    std::string header, line;
    std::getline(is, header);
    CHECK(header.find("E_S_sq") != std::string::npos);
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
}
