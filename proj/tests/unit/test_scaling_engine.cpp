#include <doctest.h>

#include <cmath>
#include <vector>

#include "rvwalk/error.hpp"
#include "rvwalk/scaling_engine.hpp"
#include "test_support.hpp"

using namespace rvwalk;
using rvwalk::testing::Q;

TEST_CASE("first factors at gamma 0, p 1/2") {
    auto t = build_sequences(MemorySpec::power_law(0.0), 0.5, 3);

    // a_{k+1} = a_k / (1 + p mu_{k+1}/nu_k), nu_k = k
    Q a{1}, v2{1};
    std::vector<Q> as{a};
    for (int k = 1; k < 3; ++k) {
        a = a / (Q{1} + Q{1, 2} * Q{1, k});
        as.push_back(a);
        v2 = v2 + a * a;
    }
    CHECK(as[1] == Q{2, 3});
    CHECK(as[2] == Q{8, 15});
    CHECK(v2 == Q{389, 225});

    CHECK(t.a_at(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(t.log_a_at(3) == doctest::Approx(std::log(8.0 / 15.0)).epsilon(1e-15));
    CHECK(t.v_sq_at(3) == doctest::Approx(389.0 / 225.0).epsilon(1e-15));
}

TEST_CASE("p = 0 leaves a_n at one") {
    for (auto s : {MemorySpec::power_law(0.5), MemorySpec::log_modulated(0.0, -1.0)}) {
        auto t = build_sequences(s, 0.0, 200);
        for (std::uint64_t n = 1; n <= 200; ++n) CHECK(t.log_a_at(n) == 0.0);
    }
}

TEST_CASE("nu is the running sum and sigma^2 is v^2/(a mu)^2") {
    auto t = build_sequences(MemorySpec::continued_product(1.0), 0.4, 100);
    CHECK(t.nu_at(100) == doctest::Approx(5050.0));
    for (std::uint64_t n : {1u, 10u, 100u}) {
        double amu = t.a_at(n) * t.mu_at(n);
        CHECK(t.sigma_sq_at(n) == doctest::Approx(t.v_sq_at(n) / (amu * amu)).epsilon(1e-12));
    }
}

TEST_CASE("generalized product at x = p matches the table") {
    auto t = build_sequences(MemorySpec::power_law(0.5), 0.3, 1000);
    auto g = generalized_log_a(t.mu, t.nu, 0.3);
    REQUIRE(g.size() == 1000);
    for (std::uint64_t n : {1u, 17u, 1000u}) CHECK(g[n - 1] == doctest::Approx(t.log_a_at(n)).epsilon(1e-13));
}

TEST_CASE("thresholds") {
    CHECK(critical_p(1.0) == 0.75);
    CHECK(hat_p(1.0) == 0.5);
    CHECK(critical_p(0.0) == 0.5);
    CHECK(hat_p(0.0) == 0.0);
}

TEST_CASE("regime classification") {
    auto r = classify_regime(MemorySpec::power_law(0.0), 0.5);
    CHECK(r.regime == Regime::CriticalUnboundedV);
    CHECK(r.predicted_scale == "n log n");

    auto z = classify_regime(MemorySpec::log_modulated(0.0, -1.0), 0.5);
    CHECK(z.regime == Regime::CriticalUnboundedV);
    CHECK(z.predicted_scale.find("log log n") != std::string::npos);

    CHECK(classify_regime(MemorySpec::power_law(0.0), 0.25).regime == Regime::Subcritical);
    CHECK(classify_regime(MemorySpec::power_law(0.0), 0.9).regime == Regime::Supercritical);
    CHECK(classify_regime(MemorySpec::log_modulated(0.0, -1.5), 0.5).regime == Regime::CriticalBoundedV);
}

TEST_CASE("bounded v implies an a.s. regime") {
    std::vector<MemorySpec> specs{MemorySpec::power_law(0.0), MemorySpec::power_law(1.0),
                                  MemorySpec::log_modulated(0.0, -1.5), MemorySpec::log_modulated(0.5, 2.0),
                                  MemorySpec::slow_growth(0.5, 0.5)};
    for (const auto& s : specs)
        for (double p : {0.0, 0.2, 0.5, 0.75, 0.9, 0.99}) {
            auto r = classify_regime(s, p);
            if (r.v_bounded == VBounded::True || r.v_bounded == VBounded::HeuristicTrue)
                CHECK((r.regime == Regime::CriticalBoundedV || r.regime == Regime::Supercritical));
        }
}

TEST_CASE("subcritical limit variance") {
    CHECK(subcritical_limit_variance(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(subcritical_limit_variance(0.25, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    // branch at p = hat p: 2 gamma^2 + 2 gamma + 1
    CHECK(subcritical_limit_variance(0.5, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
    // continuous through hat p
    CHECK(subcritical_limit_variance(0.5 + 1e-7, 1.0) == doctest::Approx(5.0).epsilon(1e-5));
    CHECK(subcritical_limit_variance(0.5 - 1e-7, 1.0) == doctest::Approx(5.0).epsilon(1e-5));
}

TEST_CASE("covariance kernel") {
    CHECK(covariance_kernel(0.5, 1.0, 0.25, 0.0) == doctest::Approx(2.0 * std::pow(0.5, 0.75)).epsilon(1e-14));
    CHECK(covariance_kernel(0.5, 1.0, 0.25, 0.0) == doctest::Approx(1.18921).epsilon(1e-5));
    CHECK(covariance_kernel(0.5, 1.0, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(covariance_kernel(0.3, 0.8, 0.0, 0.0) == doctest::Approx(0.3));
    for (double t : {0.2, 0.7, 1.0})
        CHECK(covariance_kernel(t, t, 0.3, 0.5) == doctest::Approx(subcritical_limit_variance(0.3, 0.5) * t));
    // symmetric in its arguments
    CHECK(covariance_kernel(0.4, 0.9, 0.3, 1.0) == doctest::Approx(covariance_kernel(0.9, 0.4, 0.3, 1.0)));
}

TEST_CASE("critical descriptors") {
    auto d0 = critical_descriptor(MemorySpec::power_law(0.0));
    REQUIRE(d0);
    CHECK(d0->text == "n log n");
    CHECK(d0->constant == doctest::Approx(1.0));

    auto sg = critical_descriptor(MemorySpec::slow_growth(0.5, 0.5));
    REQUIRE(sg);
    CHECK(sg->text == "n (log n)^{0.5}");
    CHECK(sg->constant == doctest::Approx(3.0));

    CHECK_FALSE(critical_descriptor(MemorySpec::log_modulated(0.0, -1.5)));

    auto cs = critical_scale(MemorySpec::log_modulated(0.0, -1.5), 10000);
    CHECK(cs.bounded);
    REQUIRE(cs.c_mu);
    CHECK(*cs.c_mu > 0.0);
}

TEST_CASE("critical scale rejects off-critical tables") {
    auto t = build_sequences(MemorySpec::power_law(0.0), 0.3, 100);
    CHECK_THROWS_AS(critical_scale(MemorySpec::power_law(0.0), t, 50), Error);
}

TEST_CASE("critical n log n scale drifts toward its constant") {
    auto spec = MemorySpec::power_law(0.0);
    auto cs3 = critical_scale(spec, 1000);
    auto cs6 = critical_scale(spec, 1000000);
    REQUIRE(cs6.closed_form_sq);
    double r3 = cs3.numeric_sq / *cs3.closed_form_sq;
    double r6 = cs6.numeric_sq / *cs6.closed_form_sq;
    CHECK(std::abs(r6 - 1.0) < std::abs(r3 - 1.0));
}

TEST_CASE("snapped floor") {
    CHECK(snapped_floor(2.9999999999999) == 3);
    CHECK(snapped_floor(2.5) == 2);
    CHECK(snapped_floor(std::pow(10.0, 6.0)) == 1000000);
}

TEST_CASE("exploratory time scales") {
    auto z = MemorySpec::log_modulated(0.0, -1.0);
    CHECK(timescale_example(z) == "zeta-zero");

    auto e = exploratory_timescale(z, TimescaleMode::Exponential, 2.0, 1000);
    CHECK(e.index == 1000000);
    double n = 1000.0;
    CHECK(e.scale == doctest::Approx(std::sqrt(n * n * std::log(n) * std::log(std::log(n)))).epsilon(1e-12));

    auto b = exploratory_timescale(z, TimescaleMode::BrownianTuned, 1.0, 1000);
    CHECK(b.index == 1000);

    auto lll = exploratory_timescale(MemorySpec::log_modulated(0.0, -1.0, ZetaLogLog{-1.0}),
                                     TimescaleMode::BrownianTuned, 1.1, 100000);
    double expect = std::floor(std::exp(std::exp(std::pow(std::log(std::log(1e5)), 1.1))));
    CHECK(double(lll.index) == doctest::Approx(expect).epsilon(1e-9));

    CHECK(timescale_example(MemorySpec::log_modulated(0.0, -1.5)).empty());
}

TEST_CASE("regime report json carries thresholds") {
    auto j = classify_regime(MemorySpec::power_law(1.0), 0.6).to_json();
    CHECK(j.at("p_c").get<double>() == 0.75);
    CHECK(j.at("p_hat").get<double>() == 0.5);
    CHECK(j.at("regime").get<std::string>() == to_string(Regime::Subcritical));
}
