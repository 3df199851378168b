#include <benchmark/benchmark.h>

#include <cmath>

#include "rvwalk/rng.hpp"
#include "rvwalk/walk_simulator.hpp"
#include "rvwalk/weighted_sampler.hpp"

namespace {

void BM_TreePushSample(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    rvwalk::DynamicWeightedIndex idx(n);
    rvwalk::Rng rng(1);
    for (auto _ : state) {
        idx.clear();
        std::uint64_t acc = 0;
        for (std::uint64_t k = 1; k <= n; ++k) {
            idx.push(std::sqrt(double(k)));
            acc += idx.sample(rng.uniform());
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["bytes/item"] = double(idx.bytes()) / double(n);
}
BENCHMARK(BM_TreePushSample)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_TreeSample(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    rvwalk::DynamicWeightedIndex idx(n);
    for (std::uint64_t k = 1; k <= n; ++k) idx.push(double(k));
    rvwalk::Rng rng(2);
    for (auto _ : state) benchmark::DoNotOptimize(idx.sample(rng.uniform()));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TreeSample)->RangeMultiplier(100)->Range(100, 10000000);

void BM_PowerEnvelope(benchmark::State& state) {
    const auto m = static_cast<std::uint64_t>(state.range(0));
    rvwalk::Rng rng(3);
    for (auto _ : state) benchmark::DoNotOptimize(rvwalk::detail::sample_power_envelope(rng.uniform(), m, 1.0, rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PowerEnvelope)->Arg(1000)->Arg(1000000);

} // namespace
