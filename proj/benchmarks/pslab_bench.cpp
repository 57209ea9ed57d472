#include <benchmark/benchmark.h>

#include "pslab/heuristics.hpp"
#include "pslab/moment_lab.hpp"
#include "pslab/prime_engine.hpp"
#include "pslab/representations.hpp"
#include "pslab/sieve_theory.hpp"

namespace {

using namespace pslab;

void BM_PrimeTable(benchmark::State& state) {
    const u64 limit = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_prime_table(limit).prime_count());
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * static_cast<int64_t>(limit));
}
BENCHMARK(BM_PrimeTable)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

void BM_Factorize(benchmark::State& state) {
    u64 n = 999'999'999'989ULL;
    for (auto _ : state) {
        benchmark::DoNotOptimize(factorize(n));
        n = n == 999'999'999'989ULL ? 999'983ULL * 1'000'003ULL : 999'999'999'989ULL;
    }
}
BENCHMARK(BM_Factorize);

void BM_R0(benchmark::State& state) {
    u64 n = 1;
    for (auto _ : state) benchmark::DoNotOptimize(r0(n++ % 1'000'000'000 + 1));
}
BENCHMARK(BM_R0);

void BM_Sweep(benchmark::State& state) {
    SweepConfig config;
    config.x = static_cast<u64>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_prime_pairs(config).entries().size());
}
BENCHMARK(BM_Sweep)->Arg(10'000'000)->Arg(100'000'000)->Unit(benchmark::kMillisecond);

void BM_SingularSeries(benchmark::State& state) {
    const RepTuple t(130, {{3, 11}, {7, 9}});
    const auto table = build_prime_table(static_cast<u64>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(singular_series(t, static_cast<u64>(state.range(0)), table).value);
}
BENCHMARK(BM_SingularSeries)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_CountFk(benchmark::State& state) {
    const RepTuple t(130, {{3, 11}, {7, 9}});
    for (auto _ : state) benchmark::DoNotOptimize(count_fk(static_cast<u64>(state.range(0)), t, false));
}
BENCHMARK(BM_CountFk)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_EulerProduct(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(euler_c_lambda(static_cast<u64>(state.range(0))).c_lambda);
}
BENCHMARK(BM_EulerProduct)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
