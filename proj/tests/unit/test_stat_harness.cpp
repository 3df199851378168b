#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "rvwalk/error.hpp"
#include "rvwalk/moment_oracle.hpp"
#include "rvwalk/rng.hpp"
#include "rvwalk/stat_harness.hpp"

using namespace rvwalk;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = sd * rng.normal();
    return x;
}

// plain OLS slope, written out independently of the harness
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

WalkConfig walk(MemorySpec spec, double p, std::uint64_t n, std::vector<std::uint64_t> cps) {
    WalkConfig c;
    c.spec = std::move(spec);
    c.p = p;
    c.n_steps = n;
    c.checkpoints = std::move(cps);
    return c;
}

} // namespace

TEST_CASE("growth of an exactly linear variance") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {1e3, 1e4, 1e5, 1e6}) pts.push_back({n, 2 * n});
    auto g = growth_exponent(pts);
    CHECK(g.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.se < 1e-10);
    CHECK_FALSE(g.superlinear);
    CHECK(g.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("growth of n log n is flagged superlinear") {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> lx, ly;
    for (double n : {1e3, 1e4, 1e5, 1e6}) {
        pts.push_back({n, n * std::log(n)});
        lx.push_back(std::log(n));
        ly.push_back(std::log(n * std::log(n)));
    }
    auto g = growth_exponent(pts);
    CHECK(g.slope == doctest::Approx(ols_slope(lx, ly)).epsilon(1e-12));
    CHECK(g.slope == doctest::Approx(1.1).epsilon(1e-3));
    CHECK(g.superlinear);
}

TEST_CASE("growth fit preconditions") {
    std::vector<std::pair<double, double>> three{{1e3, 1}, {1e4, 2}, {1e5, 3}};
    CHECK_THROWS_AS(growth_exponent(three), Error);
    std::vector<std::pair<double, double>> narrow{{10, 1}, {20, 2}, {40, 3}, {80, 4}};
    CHECK_THROWS_AS(growth_exponent(narrow), Error);
}

TEST_CASE("diffusive growth from simulation") {
    std::vector<std::uint64_t> grid{1000, 3162, 10000, 31623, 100000};
    auto cfg = walk(MemorySpec::power_law(0.0), 0.25, 100000, grid);
    std::vector<double> sum(grid.size(), 0.0);
    const std::uint64_t reps = 10000;
    run_replicas(cfg, reps, 4040, 1, [&](const WalkTrajectory& tr) {
        for (std::size_t i = 0; i < grid.size(); ++i) sum[i] += tr.S[i] * tr.S[i];
    });
    auto mt = second_moments(MemorySpec::power_law(0.0), 0.25, 100000);
    std::vector<std::pair<double, double>> pts, exact;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        pts.push_back({double(grid[i]), sum[i] / double(reps)});
        exact.push_back({double(grid[i]), mt.E_S_sq_at(grid[i])});
    }
    auto g = growth_exponent(pts);
    CHECK(g.slope >= 0.95);
    CHECK(g.slope <= 1.05);
    // the exact variance approaches 2n from below, so its fitted slope sits
    // just above one with no residual noise
    CHECK(growth_exponent(exact).slope == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("moment summary") {
    auto m = summarize({-2.0, -1.0, 0.0, 1.0, 2.0});
    CHECK(m.mean == 0.0);
    CHECK(m.second == 2.0);
    CHECK(m.variance == doctest::Approx(2.0));
    CHECK(m.skewness == doctest::Approx(0.0));
    CHECK(m.kurtosis == doctest::Approx(34.0 / 20.0));
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(2.0, 4.0) == doctest::Approx(normal_cdf(1.0)).epsilon(1e-14));
}

TEST_CASE("ks statistic of one point") {
    for (double x : {-1.3, 0.0, 0.4, 2.2}) {
        double u = normal_cdf(x);
        CHECK(ks_statistic({x}, normal_cdf, 1.0) == doctest::Approx(std::max(u, 1 - u)));
    }
}

TEST_CASE("ks p-value") {
    // Kolmogorov upper 5% point is 1.3581
    CHECK(ks_p_value(1.3581 / 1000.0, 1000000) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0));
    CHECK(ks_p_value(0.5, 1000) < 1e-12);
    CHECK(ks_p_value(0.02, 1000) > ks_p_value(0.05, 1000));
}

TEST_CASE("gaussianity self test") {
    std::vector<double> pv;
    for (std::uint64_t s = 0; s < 21; ++s) {
        auto r = gaussianity_test(normals(5000, 100 + s, std::sqrt(2.0)), 2.0);
        pv.push_back(r.ks.p_value);
        CHECK(r.ks.n == 5000);
    }
    std::nth_element(pv.begin(), pv.begin() + 10, pv.end());
    CHECK(pv[10] > 0.01);

    auto wrong = gaussianity_test(normals(5000, 7), 2.0);
    CHECK(wrong.ks.p_value < 1e-3);
}

TEST_CASE("gaussianity preconditions") {
    CHECK_THROWS_AS(gaussianity_test(normals(999, 1), 1.0), Error);
    CHECK_THROWS_AS(gaussianity_test(normals(2000, 1), 0.0), Error);
    CHECK_THROWS_AS(gaussianity_test(std::vector<double>(2000, 0.0), 1.0), Error);
}

TEST_CASE("chi-square") {
    auto exact = chi_square_test({25, 25, 50}, {0.25, 0.25, 0.5});
    CHECK(exact.statistic == 0.0);
    CHECK(exact.p_value == doctest::Approx(1.0));
    auto off = chi_square_test({10, 10, 80}, {0.25, 0.25, 0.5});
    CHECK(off.dof == 2.0);
    CHECK(off.p_value < 1e-6);
    CHECK_THROWS_AS(chi_square_test({1, 2}, {1.0}), Error);
}

TEST_CASE("covariance on the diagonal is the variance estimate") {
    auto x = normals(4000, 3, 1.5);
    auto c = covariance_check(x, x, 1.0, 2.25);
    auto g = gaussianity_test(x, 2.25);
    CHECK(c.estimate == doctest::Approx(g.variance_estimate).epsilon(1e-12));
    CHECK(std::abs(c.z) < 4.0);
}

TEST_CASE("brownian kernel from the i.i.d. walk") {
    auto cfg = walk(MemorySpec::power_law(0.0), 0.0, 1000, {500, 1000});
    auto trajs = simulate_batch(cfg, 20000, 21, 1);
    auto c = covariance_check(trajs, 0.5, 1.0, 1000, std::sqrt(1000.0), 0.5);
    CHECK(std::abs(c.estimate - 0.5) < 4 * c.se);
    CHECK_THROWS_AS(covariance_check(trajs, 0.3, 1.0, 1000, 1.0, 0.3), Error);
}

TEST_CASE("oscillation vanishes at p = 1") {
    auto spec = MemorySpec::power_law(0.0);
    auto seq = build_sequences(spec, 1.0, 4000);
    std::vector<std::uint64_t> cps;
    for (std::uint64_t n = 1000; n <= 4000; n += 50) cps.push_back(n);
    auto cfg = walk(spec, 1.0, 4000, cps);
    auto trajs = simulate_batch(cfg, 50, 3, 1);
    auto o = as_convergence_check(trajs, seq, Regime::Supercritical, 1000, 2000);
    CHECK(o.paths == 50);
    CHECK(o.q99 <= 1e-12);
}

TEST_CASE("oscillation guard") {
    auto seq = build_sequences(MemorySpec::power_law(0.0), 0.25, 100);
    std::vector<WalkTrajectory> none(1);
    try {
        as_convergence_check(none, seq, Regime::Subcritical, 10, 20);
        FAIL("expected wrong regime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongRegime);
    }
}

TEST_CASE("slln at p = 0 decays like n0^-1/2") {
    auto cfg = walk(MemorySpec::power_law(0.0), 0.0, 200000, {200000});
    cfg.sup_starts = {1000, 4000, 16000};
    auto trajs = simulate_batch(cfg, 400, 8, 1);
    auto s = slln_check(trajs, cfg.sup_starts, 0.0);
    REQUIRE(s.ratio.size() == 2);
    for (std::size_t i = 0; i < s.ratio.size(); ++i) {
        CHECK(s.ratio[i] < 0.5 + 4 * s.ratio_se[i]);
        CHECK(s.ratio[i] > 0.3);
    }
    CHECK_THROWS_AS(slln_check(trajs, cfg.sup_starts, 1.0), Error);
}

TEST_CASE("kurtosis of known laws") {
    auto g = kurtosis_check(normals(200000, 5));
    CHECK(std::abs(g.kurtosis - 3.0) < 4 * g.se);
    CHECK(g.excess == doctest::Approx(g.kurtosis - 3.0));

    std::vector<double> two;
    for (int i = 0; i < 1000; ++i) two.push_back(i % 2 ? 1.0 : -1.0);
    auto t = kurtosis_check(two);
    CHECK(t.kurtosis == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jackknife SE agrees with the brute-force jackknife") {
    auto x = normals(300, 9);
    auto fast = kurtosis_check(x);
    std::vector<double> loo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> y = x;
        y.erase(y.begin() + long(i));
        loo.push_back(summarize(y).kurtosis);
    }
    double m = 0;
    for (double v : loo) m += v;
    m /= double(loo.size());
    double ss = 0;
    for (double v : loo) ss += (v - m) * (v - m);
    double se = std::sqrt(double(x.size() - 1) / double(x.size()) * ss);
    CHECK(fast.se == doctest::Approx(se).epsilon(1e-8));
}

TEST_CASE("kurtosis guard") {
    auto x = normals(100, 1);
    CHECK_THROWS_AS(kurtosis_check(x, StandardNormal{}, Regime::Supercritical), Error);
    CHECK_THROWS_AS(kurtosis_check(x, Rademacher{}, Regime::Subcritical), Error);
    CHECK_NOTHROW(kurtosis_check(x, Rademacher{}, Regime::CriticalBoundedV));
}

TEST_CASE("quantiles") {
    std::vector<double> x{5, 1, 4, 2, 3};
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 0.5) == 3.0);
    CHECK(quantile(x, 1.0) == 5.0);
}

TEST_CASE("report verdicts and serialization") {
    ExperimentReport r;
    r.kind = "demo";
    r.add({"a", 1.0, 0.1, 1.0, "exact", "4 SE", Verdict::Pass, ""});
    CHECK(r.verdict() == Verdict::Pass);
    r.add({"b", kNaN, kNaN, kNaN, "", "", Verdict::Inconclusive, "no data"});
    CHECK(r.verdict() == Verdict::Inconclusive);
    r.add({"c", 2.0, 0.1, 1.0, "exact", "4 SE", Verdict::Fail, ""});
    CHECK(r.verdict() == Verdict::Fail);

    r.rows.push_back({10, 1.0, 1.0, 0.9, 1.1});
    auto j = r.to_json();
    CHECK(j.at("schema_version").get<int>() == kReportSchemaVersion);
    CHECK(j.at("rng_family").get<std::string>() == kRngFamily);
    CHECK(j.at("verdict").get<std::string>() == "fail");
    CHECK(j.at("checks").size() == 3);

    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str().rfind("n,estimate,target,lo,hi\n", 0) == 0);
    CHECK(r.to_text().find("demo") != std::string::npos);
}

TEST_CASE("within se") {
    CHECK(within_se(1.0, 1.3, 0.1, 4) == Verdict::Pass);
    CHECK(within_se(1.0, 1.5, 0.1, 4) == Verdict::Fail);
    CHECK(within_se(kNaN, 1.0, 0.1, 4) == Verdict::Inconclusive);
}
