#include <benchmark/benchmark.h>

#include "cxrforge/mixer.hpp"

using namespace cxrforge;

namespace {

MixtureSpec spec(MixStrategy strategy) {
    MixtureSpec s;
    s.strategy = strategy;
    s.seed = 20240601;
    std::uint64_t pool = 17;
    for (auto task : all_tasks())
        for (int d = 0; d < 3; ++d) {
            s.entries.push_back({task, "ds" + std::to_string(d), 1.0, pool});
            pool = pool * 7 % 100003 + 1;
        }
    return s;
}

void BM_SampleStream(benchmark::State &state) {
    const auto s = spec(MixStrategy::PerTaskTypeThenSize);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_stream(s, n));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleStream)->Arg(1000)->Arg(100000);

void BM_SampleEpoch(benchmark::State &state) {
    const auto s = spec(MixStrategy::PerSize);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_epoch(s, n));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleEpoch)->Arg(1000)->Arg(100000);

void BM_CounterRandom(benchmark::State &state) {
    std::uint64_t c = 0;
    for (auto _ : state) benchmark::DoNotOptimize(counter_random(42, c++));
}
BENCHMARK(BM_CounterRandom);

} // namespace
