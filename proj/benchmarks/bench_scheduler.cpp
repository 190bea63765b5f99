#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>

#include "evsched/behavior.hpp"
#include "evsched/rng.hpp"
#include "evsched/scheduler.hpp"

using namespace evsched;

namespace {

// A representative single-EV problem: K mask slots drawn around the
// evening, smooth price valley overnight.
SchedulingProblem make_problem(int mask_slots, double energy_kwh, std::uint64_t seed) {
  SchedulingProblem p;
  p.grid = TimeGrid{};
  p.price_cents_per_kwh.resize(static_cast<size_t>(p.grid.slots));
  for (int t = 0; t < p.grid.slots; ++t) {
    const double phase = (t - 30) / 144.0 * 6.283185307179586;
    p.price_cents_per_kwh[static_cast<size_t>(t)] = 17.5 + 2.5 * std::sin(phase);
  }
  SeedStream rng(seed);
  std::vector<char> used(static_cast<size_t>(p.grid.slots), 0);
  while (static_cast<int>(p.mask.slots.size()) < mask_slots) {
    int t = static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(p.grid.slots - 1)));
    if (used[static_cast<size_t>(t)]) continue;
    used[static_cast<size_t>(t)] = 1;
    p.mask.slots.push_back(t);
  }
  std::sort(p.mask.slots.begin(), p.mask.slots.end());
  p.e_required_kwh = energy_kwh;
  return p;
}

void BM_SolveSchedule(benchmark::State& state) {
  const int mask_slots = static_cast<int>(state.range(0));
  const auto p = make_problem(mask_slots, 6.4, 42);
  for (auto _ : state) {
    auto cs = solve_schedule(p);
    benchmark::DoNotOptimize(cs.cost_cents);
  }
}
BENCHMARK(BM_SolveSchedule)->Arg(24)->Arg(48)->Arg(72)->Arg(144);

void BM_BruteForce(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)), 1.6, 43);
  for (auto _ : state) {
    auto cs = brute_force_schedule(p);
    benchmark::DoNotOptimize(cs.cost_cents);
  }
}
BENCHMARK(BM_BruteForce)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
