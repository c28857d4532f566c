// Serial reference against the OpenMP kernel for each parallel entry point.

#include <benchmark/benchmark.h>

#include "herman/markov.hpp"
#include "herman/montecarlo.hpp"
#include "herman/simplex_opt.hpp"

using namespace herman;

namespace {

const Configuration kSimConfig(12, {1, 5, 9});

void BM_EstimateSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(estimate_serial(kSimConfig, state.range(0), 1));
}
void BM_EstimateParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(estimate_parallel(kSimConfig, state.range(0), 1));
}
BENCHMARK(BM_EstimateSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)->Arg(20000)->Unit(benchmark::kMillisecond);

std::vector<GapVector> drift_states() {
  RandomStream rng(7);
  std::vector<GapVector> states;
  for (int t = 0; t < 64; ++t) states.push_back(random_gap_vector(25, 9, rng));
  return states;
}

void BM_DriftSerial(benchmark::State& state) {
  const auto states = drift_states();
  for (auto _ : state) benchmark::DoNotOptimize(drift_records_serial(states));
}
void BM_DriftParallel(benchmark::State& state) {
  const auto states = drift_states();
  for (auto _ : state) benchmark::DoNotOptimize(drift_records_parallel(states));
}
BENCHMARK(BM_DriftSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DriftParallel)->Unit(benchmark::kMillisecond);

void BM_TransitionLawsSerial(benchmark::State& state) {
  const auto space = full_state_space(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transition_laws_serial(space));
}
void BM_TransitionLawsParallel(benchmark::State& state) {
  const auto space = full_state_space(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(transition_laws_parallel(space));
}
BENCHMARK(BM_TransitionLawsSerial)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransitionLawsParallel)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_StartsSerial(benchmark::State& state) {
  OptimizerConfig cfg;
  cfg.starts = 40;
  for (auto _ : state) benchmark::DoNotOptimize(run_starts_serial(Target::f, 9, cfg, true));
}
void BM_StartsParallel(benchmark::State& state) {
  OptimizerConfig cfg;
  cfg.starts = 40;
  for (auto _ : state) benchmark::DoNotOptimize(run_starts_parallel(Target::f, 9, cfg, true));
}
BENCHMARK(BM_StartsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StartsParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
