#include <doctest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <vector>

#include "rvwalk/error.hpp"
#include "rvwalk/moment_oracle.hpp"
#include "rvwalk/stat_harness.hpp"
#include "rvwalk/walk_simulator.hpp"

using namespace rvwalk;

namespace {

WalkConfig make(MemorySpec spec, double p, std::uint64_t n, std::vector<std::uint64_t> cps = {}) {
    WalkConfig c;
    c.spec = std::move(spec);
    c.p = p;
    c.n_steps = n;
    c.checkpoints = cps.empty() ? std::vector<std::uint64_t>{n} : std::move(cps);
    return c;
}

std::vector<std::uint64_t> every(std::uint64_t n) {
    std::vector<std::uint64_t> v(n);
    std::iota(v.begin(), v.end(), 1);
    return v;
}

// mean and standard error of S_n^2 at the last checkpoint
std::pair<double, double> second_moment(const WalkConfig& cfg, std::uint64_t replicas, std::uint64_t seed) {
    std::vector<double> sq(replicas);
    run_replicas(cfg, replicas, seed, 1, [&](const WalkTrajectory& tr) {
        sq[tr.replica] = tr.S.back() * tr.S.back();
    });
    auto m = summarize(sq);
    return {m.mean, std::sqrt(m.variance / double(replicas))};
}

} // namespace

TEST_CASE("sampler selection") {
    CHECK(make(MemorySpec::power_law(0.0), 0.5, 10).sampler_kind() == SamplerKind::Uniform);
    CHECK(make(MemorySpec::power_law(1.0), 0.0, 10).sampler_kind() == SamplerKind::Uniform);
    CHECK(make(MemorySpec::power_law(1.0), 0.5, 10).sampler_kind() == SamplerKind::PowerEnvelope);
    CHECK(make(MemorySpec::power_law(-0.5), 0.5, 10).sampler_kind() == SamplerKind::Tree);
    CHECK(make(MemorySpec::continued_product(1.0), 0.5, 10).sampler_kind() == SamplerKind::Tree);
    auto forced = make(MemorySpec::power_law(0.0), 0.5, 10);
    forced.sampler = SamplerChoice::Tree;
    CHECK(forced.sampler_kind() == SamplerKind::Tree);
}

TEST_CASE("p = 1 repeats the first step") {
    for (auto spec : {MemorySpec::power_law(0.0), MemorySpec::power_law(1.0), MemorySpec::log_modulated(0.0, 1.0)}) {
        auto cfg = make(spec, 1.0, 500, every(500));
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            cfg.seed = seed;
            auto tr = simulate(cfg);
            double x1 = tr.S[0];
            CHECK(std::abs(x1) == 1.0);
            for (std::size_t i = 0; i < tr.n.size(); ++i) CHECK(tr.S[i] == double(tr.n[i]) * x1);
        }
    }
}

TEST_CASE("p = 0 gives an i.i.d. walk") {
    auto cfg = make(MemorySpec::power_law(1.0), 0.0, 64);
    auto [m, se] = second_moment(cfg, 40000, 9);
    CHECK(std::abs(m - 64.0) < 4 * se);
}

TEST_CASE("second moment at n = 2") {
    auto cfg = make(MemorySpec::power_law(0.0), 0.5, 2);
    auto [m, se] = second_moment(cfg, 1000000, 31337);
    CHECK(std::abs(m - 3.0) < 3 * se);
}

TEST_CASE("every sampler matches the exact second moment") {
    struct Case {
        MemorySpec spec;
        double p;
        bool force_tree;
    };
    std::vector<Case> cases{
        {MemorySpec::power_law(1.0), 0.6, false},
        {MemorySpec::power_law(1.0), 0.6, true},
        {MemorySpec::power_law(0.0), 0.7, false},
        {MemorySpec::power_law(0.0), 0.7, true},
        {MemorySpec::continued_product(0.5), 0.8, false},
    };
    const std::uint64_t n = 60;
    for (const auto& c : cases) {
        auto cfg = make(c.spec, c.p, n);
        if (c.force_tree) cfg.sampler = SamplerChoice::Tree;
        CAPTURE(to_string(cfg.sampler_kind()));
        CAPTURE(c.p);
        double exact = second_moments(c.spec, c.p, n).E_S_sq_at(n);
        auto [m, se] = second_moment(cfg, 100000, 555);
        CHECK(std::abs(m - exact) < 4 * se);
    }
}

TEST_CASE("mean of S_n is zero") {
    auto cfg = make(MemorySpec::power_law(0.5), 0.7, 1000);
    std::vector<double> s(10000);
    run_replicas(cfg, s.size(), 2718, 1, [&](const WalkTrajectory& tr) { s[tr.replica] = tr.S.back(); });
    auto m = summarize(s);
    CHECK(std::abs(m.mean) < 4 * std::sqrt(m.variance / double(s.size())));
}

TEST_CASE("one replica equals simulate on the derived stream") {
    auto cfg = make(MemorySpec::power_law(0.5), 0.6, 3000, geometric_checkpoints(3000, 12));
    auto batch = simulate_batch(cfg, 1, 99, 1);
    cfg.seed = derive_stream_seed(99, 0);
    auto single = simulate(cfg);
    REQUIRE(batch.size() == 1);
    CHECK(batch[0].S == single.S);
    CHECK(batch[0].seed == single.seed);
}

TEST_CASE("batches are identical across seeds and thread counts") {
    auto cfg = make(MemorySpec::continued_product(1.0), 0.8, 2000, geometric_checkpoints(2000, 10));
    cfg.record_martingales = true;
    auto a = simulate_batch(cfg, 37, 5, 1);
    auto b = simulate_batch(cfg, 37, 5, 4);
    auto c = simulate_batch(cfg, 37, 5, 0);
    REQUIRE(a.size() == 37);
    for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(a[r].replica == r);
        CHECK(a[r].S == b[r].S);
        CHECK(a[r].M == b[r].M);
        CHECK(a[r].S == c[r].S);
    }
    auto d = simulate_batch(cfg, 37, 6, 1);
    CHECK(a[0].S != d[0].S);
}

TEST_CASE("walker reuse does not leak state") {
    auto cfg = make(MemorySpec::power_law(-0.5), 0.6, 500, every(500));
    Walker w(cfg);
    auto first = w.run(11);
    w.run(12);
    auto again = w.run(11);
    CHECK(first.S == again.S);
}

TEST_CASE("steps are the innovation values") {
    auto cfg = make(MemorySpec::power_law(0.0), 0.6, 200, every(200));
    auto tr = simulate(cfg);
    double prev = 0.0;
    for (double s : tr.S) {
        CHECK(std::abs(s - prev) == 1.0);
        prev = s;
    }
    CHECK(tr.last_step == tr.S.back() - tr.S[tr.S.size() - 2]);
}

TEST_CASE("decomposition identities") {
    for (auto spec : {MemorySpec::power_law(0.0), MemorySpec::power_law(1.0), MemorySpec::log_modulated(0.0, -1.0)}) {
        for (double p : {0.3, critical_p(spec.gamma())}) {
            auto cfg = make(spec, p, 20000, geometric_checkpoints(20000, 30));
            cfg.record_martingales = true;
            for (std::uint64_t seed : {1u, 2u}) {
                cfg.seed = seed;
                auto tr = simulate(cfg);
                REQUIRE(tr.M.size() == tr.n.size());
                auto id = check_decompositions(tr);
                CHECK(id.max_rel_L <= 1e-9);
                CHECK(id.max_rel_N <= 1e-9);
            }
        }
    }
}

TEST_CASE("exact running sup of |S_n/n|") {
    auto cfg = make(MemorySpec::power_law(0.0), 0.5, 400, every(400));
    cfg.sup_starts = {1, 10, 100, 400};
    cfg.seed = 8;
    auto tr = simulate(cfg);
    REQUIRE(tr.sup_abs_mean.size() == 4);
    for (std::size_t j = 0; j < cfg.sup_starts.size(); ++j) {
        double best = 0.0;
        for (std::size_t i = cfg.sup_starts[j] - 1; i < tr.S.size(); ++i)
            best = std::max(best, std::abs(tr.S[i]) / double(tr.n[i]));
        CHECK(tr.sup_abs_mean[j] == best);
    }
    CHECK(tr.sup_abs_mean[0] == 1.0);
}

TEST_CASE("marginal law keeps the innovation law") {
    auto cfg = make(MemorySpec::power_law(1.0), 0.6, 40);
    auto x = marginal_law_sample(cfg, 40, 200000, 17, 1);
    double ones = 0;
    for (double v : x) {
        REQUIRE(std::abs(v) == 1.0);
        ones += v > 0;
    }
    double frac = ones / double(x.size());
    CHECK(std::abs(frac - 0.5) < 4 * std::sqrt(0.25 / double(x.size())));

    cfg.innovation = StandardNormal{};
    auto z = marginal_law_sample(cfg, 1, 20000, 18, 1);
    CHECK(gaussianity_test(z, 1.0).ks.p_value > 1e-3);
}

TEST_CASE("custom innovations are rescaled to unit variance") {
    auto cfg = make(MemorySpec::power_law(0.0), 0.0, 1);
    CustomIID law;
    law.quantiles = {-1.0, 1.0};
    law.declared_mean = 0.0;
    law.declared_variance = 1.0 / 3.0;
    cfg.innovation = law;
    auto x = marginal_law_sample(cfg, 1, 50000, 3, 1);
    auto m = summarize(x);
    // uniform on [-1, 1] scaled by sqrt(3)
    for (double v : x) REQUIRE(std::abs(v) <= std::sqrt(3.0) + 1e-12);
    CHECK(m.second == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("checkpoint grids") {
    auto g = geometric_checkpoints(1000000, 20);
    CHECK(g.front() == 1);
    CHECK(g.back() == 1000000);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    auto w = geometric_checkpoints(1000, 2000, 50);
    CHECK(w.front() == 1000);
    CHECK(w.back() == 2000);
    CHECK(geometric_checkpoints(1, 5) == std::vector<std::uint64_t>{1});
}

TEST_CASE("validation") {
    auto cfg = make(MemorySpec::power_law(0.0), 1.5, 10);
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = make(MemorySpec::power_law(0.0), 0.5, 10, {3, 3});
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = make(MemorySpec::table({1.0, 2.0}, 0.0), 0.5, 5);
    CHECK_THROWS_AS(cfg.validate(), Error);

    cfg = make(MemorySpec::power_law(-0.5), 0.5, 100000000);
    cfg.memory_cap_bytes = 1 << 20;
    try {
        cfg.validate();
        FAIL("expected resource limit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ResourceLimit);
    }
}

TEST_CASE("footprint stays within two words per step") {
    auto tree = make(MemorySpec::power_law(-0.5), 0.5, 1000000);
    CHECK(tree.footprint_bytes() <= 16 * 1000001);
    auto flat = make(MemorySpec::power_law(0.0), 0.5, 1000000);
    CHECK(flat.footprint_bytes() <= 1000000 / 8 + 8);
}

TEST_CASE("config json and hash") {
    auto cfg = make(MemorySpec::log_modulated(0.0, -1.0), 0.5, 1234, {10, 100, 1234});
    cfg.record_martingales = true;
    cfg.innovation = StandardNormal{};
    cfg.seed = 77;
    auto back = WalkConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(back.hash() == cfg.hash());

    auto reseeded = cfg;
    reseeded.seed = 78;
    CHECK(reseeded.hash() == cfg.hash());
    reseeded.p = 0.4;
    CHECK(reseeded.hash() != cfg.hash());
}

TEST_CASE("binary trajectories round trip") {
    auto cfg = make(MemorySpec::power_law(0.5), 0.6, 500, geometric_checkpoints(500, 8));
    cfg.record_martingales = true;
    auto trajs = simulate_batch(cfg, 5, 1, 1);
    std::stringstream ss;
    write_trajectories_binary(ss, trajs);
    auto back = read_trajectories_binary(ss);
    REQUIRE(back.size() == trajs.size());
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        CHECK(back[r].seed == trajs[r].seed);
        CHECK(back[r].n == trajs[r].n);
        CHECK(back[r].S == trajs[r].S);
        CHECK(back[r].M == trajs[r].M);
        CHECK(back[r].N == trajs[r].N);
    }

    std::stringstream bad("NOPE");
    CHECK_THROWS_AS(read_trajectories_binary(bad), Error);
}

TEST_CASE("csv has one row per replica and checkpoint") {
    auto cfg = make(MemorySpec::power_law(0.0), 0.3, 100, {10, 50, 100});
    auto trajs = simulate_batch(cfg, 4, 2, 1);
    std::stringstream ss;
    write_trajectories_csv(ss, trajs);
    std::string line;
    int lines = 0;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 1 + 4 * 3);
}
