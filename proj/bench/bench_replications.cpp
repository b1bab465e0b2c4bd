#include <benchmark/benchmark.h>

#include "lorawsn/replicate.hpp"
#include "lorawsn/scenario_file.hpp"

using namespace lorawsn::sim;

namespace {

Scenario bench_scenario() {
  Scenario s = default_scenario();
  s.duration_s = 86400;
  return s;
}

void BM_ReplicationsSerial(benchmark::State& state) {
  const Scenario s = bench_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_replications_serial(s, static_cast<int>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicationsParallel(benchmark::State& state) {
  const Scenario s = bench_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_replications(s, static_cast<int>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SingleDay(benchmark::State& state) {
  const Scenario s = bench_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(s));
}

}  // namespace

BENCHMARK(BM_ReplicationsSerial)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReplicationsParallel)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleDay)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
