#include <benchmark/benchmark.h>

#include "duelbench/environments.hpp"
#include "duelbench/harness.hpp"
#include "duelbench/oracle.hpp"
#include "duelbench/swift.hpp"
#include "duelbench/window_search.hpp"

using namespace duelbench;

namespace {

PrefixSeries noisy_series(Round n) {
  PrefixSeries series(static_cast<std::size_t>(n));
  RngStream rng(3, StreamKey{});
  for (Round s = 0; s < n; ++s) series.append(rng.uniform() < 0.5 ? 0.5 : -0.5);
  return series;
}

// One query at the end of a long history.
void BM_LatestCrossing(benchmark::State& state, IntervalMode mode) {
  const Round n = state.range(0);
  const auto series = noisy_series(n);
  const WindowThreshold threshold(0.5, n, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(latest_crossing(series, Direction::kUp, 1, n, threshold, mode));
  }
}
BENCHMARK_CAPTURE(BM_LatestCrossing, exact, IntervalMode::kExact)->Range(1 << 10, 1 << 16);
BENCHMARK_CAPTURE(BM_LatestCrossing, exhaustive, IntervalMode::kExhaustive)->Range(1 << 10, 1 << 16);
BENCHMARK_CAPTURE(BM_LatestCrossing, dyadic, IntervalMode::kDyadic)->Range(1 << 10, 1 << 16);

void BM_SignificantShifts(benchmark::State& state) {
  ExperimentConfig config;
  config.family = EnvFamily::kBtlSwitching;
  config.k = 10;
  config.horizon = state.range(0);
  const auto trace = build_trace(config, 0);
  for (auto _ : state) benchmark::DoNotOptimize(significant_shifts(trace));
}
BENCHMARK(BM_SignificantShifts)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

// Full METASWIFT trial, reported per round.
void BM_MetaSwiftTrial(benchmark::State& state) {
  ExperimentConfig config;
  config.family = EnvFamily::kBtlSwitching;
  config.policy = PolicyKind::kMetaSwift;
  config.k = 10;
  config.horizon = state.range(0);
  config.c = 0.3;
  config.trials = 1;
  config.thin = config.horizon;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(config));
  state.SetItemsProcessed(state.iterations() * config.horizon);
}
BENCHMARK(BM_MetaSwiftTrial)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
