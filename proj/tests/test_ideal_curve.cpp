#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "evsched/errors.hpp"
#include "evsched/ideal_curve.hpp"
#include "evsched/rng.hpp"

using namespace evsched;

namespace {

// Independent oracle: enumerate every (s1, s2) pair with naive sums and
// the same window/flat-level definition, tracking the lexicographic best
// (s1 + s2, flat level, s1).
struct OraclePick {
  int s1 = 0, s2 = 0;
  double level = 0.0;
};

std::optional<OraclePick> oracle_best_window(const DemandSeries& x, double energy_kwh) {
  const int s = x.grid.slots;
  const double dt = x.grid.slot_hours;
  int h = 0;
  for (int t = 1; t < s; ++t)
    if (x.kw[t] > x.kw[h]) h = t;

  std::optional<OraclePick> best;
  int best_total = std::numeric_limits<int>::max();
  for (int s1 = 0; s1 <= h; ++s1) {
    for (int s2 = 0; s2 <= s - 1 - h; ++s2) {
      double outside_sum = 0.0;
      double outside_max = -std::numeric_limits<double>::infinity();
      int outside_count = 0;
      for (int t = 0; t < s; ++t) {
        const bool in_window = t > h - s1 && t <= h + s2;
        if (in_window) continue;
        outside_sum += x.kw[t];
        outside_max = std::max(outside_max, x.kw[t]);
        ++outside_count;
      }
      const double level = (energy_kwh / dt + outside_sum) / outside_count;
      if (level < outside_max) continue;
      const int total = s1 + s2;
      if (total < best_total || (total == best_total && level < best->level)) {
        best_total = total;
        best = OraclePick{s1, s2, level};
      }
    }
  }
  return best;
}

DemandSeries series_of(std::vector<double> kw) {
  TimeGrid g = TimeGrid::with_slots(static_cast<int>(kw.size()));
  return DemandSeries{g, std::move(kw)};
}

DemandSeries random_series(int slots, std::uint64_t seed) {
  SeedStream rng(seed);
  std::vector<double> kw(static_cast<size_t>(slots));
  const double peak_at = rng.uniform(0.2, 0.8) * slots;
  for (int t = 0; t < slots; ++t) {
    const double d = (t - peak_at) / (0.08 * slots + rng.uniform(0.0, 4.0));
    kw[static_cast<size_t>(t)] =
        rng.uniform(0.5, 1.5) + 8.0 * std::exp(-0.5 * d * d) + rng.uniform(0.0, 0.3);
  }
  return series_of(std::move(kw));
}

}  // namespace

TEST_SUITE("ideal_curve") {
  TEST_CASE("peak index picks earliest maximum") {
    CHECK(peak_index(series_of({1, 3, 2})) == 1);
    CHECK(peak_index(series_of({5, 5, 1})) == 0);
    CHECK_THROWS_AS(peak_index(DemandSeries{TimeGrid{}, {}}), ParameterError);
  }

  TEST_CASE("flat input keeps an empty window and raises the level") {
    TimeGrid g;  // S = 144
    DemandSeries x{g, std::vector<double>(144, 2.0)};
    const double energy = 4.8;
    const auto res = solve_ideal_curve(x, energy);
    REQUIRE(res.feasible);
    CHECK(res.s1 == 0);
    CHECK(res.s2 == 0);
    const double expected_level = 2.0 + energy / 24.0;
    CHECK(res.flat_level_kw == doctest::Approx(expected_level).epsilon(1e-12));
    for (double v : res.ideal_total.kw) CHECK(v == doctest::Approx(expected_level));
    CHECK(ideal_peak(res) == doctest::Approx(expected_level));
  }

  TEST_CASE("zero energy returns the input unchanged") {
    const auto x = random_series(60, 7);
    const auto res = solve_ideal_curve(x, 0.0);
    REQUIRE(res.feasible);
    CHECK(res.s1 == 0);
    CHECK(res.s2 == 0);
    CHECK(res.desired_ev.kw == std::vector<double>(60, 0.0));
    CHECK(res.ideal_total.kw == x.kw);
    CHECK(ideal_peak(res) == doctest::Approx(*std::max_element(x.kw.begin(), x.kw.end())));
  }

  TEST_CASE("negative energy is rejected") {
    CHECK_THROWS_AS(solve_ideal_curve(series_of({1, 2, 1}), -1.0), ParameterError);
  }

  TEST_CASE("five-slot example matches exhaustive enumeration") {
    const auto x = series_of({1, 2, 5, 2, 1});
    const double energy = 4.0;
    const auto res = solve_ideal_curve(x, energy);
    const auto pick = oracle_best_window(x, energy);
    REQUIRE(res.feasible);
    REQUIRE(pick.has_value());
    CHECK(res.s1 == pick->s1);
    CHECK(res.s2 == pick->s2);
    CHECK(res.flat_level_kw == doctest::Approx(pick->level).epsilon(1e-12));
    CHECK(ideal_peak(res) == doctest::Approx(std::max(5.0, pick->level)));
  }

  TEST_CASE("window minimizer matches the oracle on seeded series") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const int slots = 24 + static_cast<int>(seed % 5) * 24;
      const auto x = random_series(slots, seed);
      const double energy = 0.3 * x.energy_kwh();
      const auto res = solve_ideal_curve(x, energy);
      const auto pick = oracle_best_window(x, energy);
      REQUIRE(res.feasible);
      REQUIRE(pick.has_value());
      CHECK(res.s1 == pick->s1);
      CHECK(res.s2 == pick->s2);
      CHECK(res.flat_level_kw == doctest::Approx(pick->level).epsilon(1e-9));
    }
  }

  TEST_CASE("energy conservation and window zeroing") {
    const auto x = random_series(144, 11);
    const double energy = 120.0;
    const auto res = solve_ideal_curve(x, energy);
    REQUIRE(res.feasible);
    double placed = 0.0;
    for (int t = 0; t < 144; ++t) {
      if (res.in_window(t)) {
        CHECK(res.desired_ev.kw[static_cast<size_t>(t)] == 0.0);
        CHECK(res.ideal_total.kw[static_cast<size_t>(t)] ==
              doctest::Approx(x.kw[static_cast<size_t>(t)]));
      } else {
        CHECK(res.desired_ev.kw[static_cast<size_t>(t)] >= 0.0);
        CHECK(res.ideal_total.kw[static_cast<size_t>(t)] ==
              doctest::Approx(res.flat_level_kw));
      }
      placed += res.desired_ev.kw[static_cast<size_t>(t)];
    }
    CHECK(std::abs(placed * x.grid.slot_hours - energy) <= 1e-6);
  }

  TEST_CASE("peak dominance and monotonicity in energy") {
    const auto x = random_series(96, 13);
    const double x_peak = x.kw[static_cast<size_t>(peak_index(x))];
    double prev_peak = 0.0;
    for (double energy : {0.0, 5.0, 20.0, 60.0, 200.0}) {
      const auto res = solve_ideal_curve(x, energy);
      REQUIRE(res.feasible);
      const double pk = ideal_peak(res);
      CHECK(pk >= x_peak - 1e-12);
      CHECK(pk >= prev_peak - 1e-9);
      prev_peak = pk;
    }
  }
}
