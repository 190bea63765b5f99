#include <benchmark/benchmark.h>

#include "evsched/experiment.hpp"

using namespace evsched;

namespace {

void BM_Pipeline(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.households = static_cast<int>(state.range(0));
  cfg.observed_days = 30;
  cfg.trials = 1;
  for (auto _ : state) {
    auto result = run_pipeline(cfg);
    benchmark::DoNotOptimize(result.median_optimized_peak_kw);
  }
}
BENCHMARK(BM_Pipeline)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_IdealCurve(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.households = 200;
  cfg.observed_days = 1;
  SynthesisParams params;
  params.n_households = cfg.households;
  params.observed_days = 1;
  const auto scenario = synthesize_community(params);
  const auto residential = aggregate_residential(scenario);
  const double energy = scenario.total_ev_energy_kwh();
  for (auto _ : state) {
    auto ideal = solve_ideal_curve(residential, energy);
    benchmark::DoNotOptimize(ideal.flat_level_kw);
  }
}
BENCHMARK(BM_IdealCurve)->Unit(benchmark::kMicrosecond);

}  // namespace
