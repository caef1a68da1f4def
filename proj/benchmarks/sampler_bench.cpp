#include <benchmark/benchmark.h>

#include "permorder/sampler.hpp"

using namespace permorder;

static void BM_SampleCycleType(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  sampler::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler::sample_cycle_type(n, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleCycleType)->Arg(10)->Arg(100)->Arg(10000);

static void BM_SampleOrder(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  sampler::Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler::order_of(sampler::sample_cycle_type(n, rng)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleOrder)->Arg(10)->Arg(100)->Arg(10000);

static void BM_EstimateP(benchmark::State& state) {
  const auto threads = static_cast<unsigned>(state.range(0));
  const sampler::RunOptions options{1'000'000, 7, threads};
  for (auto _ : state) benchmark::DoNotOptimize(sampler::estimate_p(50, Natural(50), options));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(options.trials));
}
BENCHMARK(BM_EstimateP)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
