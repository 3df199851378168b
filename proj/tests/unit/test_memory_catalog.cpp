#include <doctest.h>

#include <cmath>
#include <vector>

#include "rvwalk/error.hpp"
#include "rvwalk/memory_catalog.hpp"

using namespace rvwalk;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected rvwalk::Error");
    return ErrorKind::Unsupported;
}

} // namespace

TEST_CASE("power law values") {
    CHECK(MemorySpec::power_law(0.0).mu(17) == 1.0);
    CHECK(MemorySpec::power_law(1.0).mu(7) == doctest::Approx(7.0));
    CHECK(MemorySpec::power_law(0.5).mu(9) == doctest::Approx(3.0));
    CHECK(MemorySpec::power_law(-0.5).mu(4) == doctest::Approx(0.5));
}

TEST_CASE("continued product matches its factors") {
    auto s = MemorySpec::continued_product(1.0);
    CHECK(s.mu(1) == 1.0);
    CHECK(s.mu(3) == doctest::Approx(3.0));

    // gamma = 0.5: mu_4 = (1 + .5)(1 + .25)(1 + 1/6)
    auto h = MemorySpec::continued_product(0.5);
    CHECK(h.mu(4) == doctest::Approx(1.5 * 1.25 * (1.0 + 0.5 / 3.0)).epsilon(1e-14));
}

TEST_CASE("log modulated at e^2") {
    auto s = MemorySpec::log_modulated(0.0, 1.0);
    CHECK(s.mu(8) == doctest::Approx(std::log(8.0)).epsilon(1e-14));
    CHECK(s.mu(8) == doctest::Approx(2.0794415416798).epsilon(1e-12));
}

TEST_CASE("index is the declared gamma") {
    CHECK(rv_index(MemorySpec::power_law(-0.25)) == -0.25);
    CHECK(rv_index(MemorySpec::continued_product(1.0)) == 1.0);
    CHECK(rv_index(MemorySpec::table({1.0, 2.0, 3.0}, 0.5)) == 0.5);
}

TEST_CASE("streamed sequence equals pointwise evaluation") {
    std::vector<MemorySpec> specs{
        MemorySpec::power_law(0.7),
        MemorySpec::continued_product(1.3),
        MemorySpec::log_modulated(0.5, -1.0),
        MemorySpec::log_modulated(0.0, 0.5, ZetaPower{1.0, 0.5}),
        MemorySpec::log_modulated(0.0, 0.0, ZetaLogLog{1.0}),
        MemorySpec::slow_growth(0.5, 0.5),
        MemorySpec::table({2.0, 1.0, 4.0, 3.0}, 0.0),
    };
    for (const auto& s : specs) {
        CAPTURE(s.describe());
        MemorySequence seq(s);
        std::uint64_t last = s.max_index().value_or(5000);
        for (std::uint64_t n = 1; n <= last; ++n) {
            double v = seq.next();
            REQUIRE(v > 0.0);
            CHECK(v == doctest::Approx(s.mu(n)).epsilon(1e-11));
        }
        CHECK(seq.index() == last);
    }
}

TEST_CASE("slowly varying part") {
    auto s = MemorySpec::log_modulated(1.0, 2.0);
    for (std::uint64_t n : {10u, 1000u, 100000u})
        CHECK(s.log_ell(n) == doctest::Approx(s.log_mu(n) - std::log(double(n))).epsilon(1e-12));
    CHECK(MemorySpec::power_law(0.3).log_ell(12345) == doctest::Approx(0.0));
}

TEST_CASE("invalid specs are rejected") {
    CHECK(kind_of([] { MemorySpec::power_law(-1.0); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { MemorySpec::power_law(NAN); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { MemorySpec::table({}, 0.0); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { MemorySpec::table({1.0, -2.0}, 0.0); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { MemorySpec::slow_growth(0.0, 1.0); }) == ErrorKind::InvalidSpec);
    CHECK(kind_of([] { MemorySpec::log_modulated(0.0, 0.0, ZetaPower{1.0, 1.5}); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("out of range indices") {
    auto t = MemorySpec::table({1.0, 2.0}, 0.0);
    CHECK(t.mu(2) == 2.0);
    CHECK(kind_of([&] { t.mu(3); }) == ErrorKind::OutOfRange);
    CHECK(kind_of([] { MemorySpec::power_law(0.0).mu(0); }) == ErrorKind::OutOfRange);
}

TEST_CASE("unit detection") {
    CHECK(MemorySpec::power_law(0.0).is_unit());
    CHECK(MemorySpec::continued_product(0.0).is_unit());
    CHECK_FALSE(MemorySpec::power_law(0.1).is_unit());
    CHECK_FALSE(MemorySpec::log_modulated(0.0, 1.0).is_unit());
}

TEST_CASE("json round trip") {
    std::vector<MemorySpec> specs{
        MemorySpec::power_law(0.25),
        MemorySpec::continued_product(2.0),
        MemorySpec::log_modulated(0.0, -1.0),
        MemorySpec::log_modulated(0.0, 0.5, ZetaPower{2.0, 0.25}),
        MemorySpec::log_modulated(0.0, 0.0, ZetaLogLog{-1.0}),
        MemorySpec::slow_growth(0.5, 0.5),
        MemorySpec::table({1.0, 0.5, 0.25}, -0.5),
    };
    for (const auto& s : specs) {
        auto back = MemorySpec::from_json(s.to_json());
        CHECK(back == s);
        CHECK(back.family_name() == s.family_name());
    }
    CHECK(kind_of([] { MemorySpec::from_json(nlohmann::json{{"family", "nope"}}); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("index estimate of a power table") {
    std::vector<double> v;
    for (int n = 1; n <= 4000; ++n) v.push_back(std::pow(double(n), 0.75));
    CHECK(estimate_index(v) == doctest::Approx(0.75).epsilon(1e-6));
}
