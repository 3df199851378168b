#include <benchmark/benchmark.h>

#include "rvwalk/walk_simulator.hpp"

namespace {

rvwalk::WalkConfig config(rvwalk::MemorySpec spec, std::uint64_t n, bool force_tree) {
    rvwalk::WalkConfig c;
    c.spec = std::move(spec);
    c.p = 0.5;
    c.n_steps = n;
    c.checkpoints = {n};
    if (force_tree) c.sampler = rvwalk::SamplerChoice::Tree;
    return c;
}

void run_walk(benchmark::State& state, const rvwalk::WalkConfig& cfg) {
    rvwalk::Walker w(cfg);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(w.run(++seed).S.back());
    state.SetItemsProcessed(state.iterations() * std::int64_t(cfg.n_steps));
    state.counters["bytes/step"] = double(cfg.footprint_bytes()) / double(cfg.n_steps);
    state.counters["sampler"] = double(static_cast<int>(cfg.sampler_kind()));
}

void BM_WalkUniform(benchmark::State& state) {
    run_walk(state, config(rvwalk::MemorySpec::power_law(0.0), std::uint64_t(state.range(0)), false));
}
BENCHMARK(BM_WalkUniform)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_WalkPowerEnvelope(benchmark::State& state) {
    run_walk(state, config(rvwalk::MemorySpec::power_law(1.0), std::uint64_t(state.range(0)), false));
}
BENCHMARK(BM_WalkPowerEnvelope)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_WalkTree(benchmark::State& state) {
    run_walk(state, config(rvwalk::MemorySpec::power_law(0.0), std::uint64_t(state.range(0)), true));
}
BENCHMARK(BM_WalkTree)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

} // namespace
