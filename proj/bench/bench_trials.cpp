// Serial reference vs OpenMP kernel on the same trial workload.

#include <benchmark/benchmark.h>

#include <numbers>

#include "tele/montecarlo.hpp"

namespace {

using namespace tele;

mc::TrialConfig workload(std::uint64_t n) {
  constexpr double r2 = std::numbers::sqrt2 / 2;
  mc::TrialConfig c;
  c.n_trials = n;
  c.seed = 7;
  c.phi = protocol::UnknownQubit::make({0, r2}, {0.5, 0.5});
  c.protocol.strategy = protocol::Strategy::ResetRetry;
  c.protocol.max_resets = 4;
  return c;
}

void BM_Serial(benchmark::State& state) {
  const auto cfg = workload(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mc::run_trials_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OpenMP(benchmark::State& state) {
  const auto cfg = workload(static_cast<std::uint64_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mc::run_trials(cfg, workers));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)
    ->ArgsProduct({{10000, 100000}, {1, 2, 4, 8}})
    ->ArgNames({"trials", "workers"})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
