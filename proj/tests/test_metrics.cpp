#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "evsched/errors.hpp"
#include "evsched/metrics.hpp"

using namespace evsched;

namespace {

DemandSeries series_of(std::vector<double> kw) {
  TimeGrid g = TimeGrid::with_slots(static_cast<int>(kw.size()));
  return DemandSeries{g, std::move(kw)};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("constant series has zero ramps and variance") {
    TimeGrid g;
    const auto m = compute_metrics(DemandSeries{g, std::vector<double>(144, 3.25)});
    CHECK(m.peak_kw == doctest::Approx(3.25));
    CHECK(m.variance_kw2 == doctest::Approx(0.0));
    CHECK(m.ramp_min == doctest::Approx(0.0));
    CHECK(m.ramp_max == doctest::Approx(0.0));
  }

  TEST_CASE("two-slot step gives the direct ramp rate") {
    // 10-minute slots: (10 - 0) / 10 = 1 kW/min
    TimeGrid g;
    DemandSeries s{g, std::vector<double>(144, 0.0)};
    s.kw[1] = 10.0;
    const auto m = compute_metrics(s);
    CHECK(m.ramp_kw_per_min[0] == doctest::Approx(1.0));
    CHECK(m.ramp_kw_per_min[1] == doctest::Approx(-1.0));
  }

  TEST_CASE("reduction percentage reproduces the published arithmetic") {
    TimeGrid g;
    DemandSeries s{g, std::vector<double>(144, 1.0)};
    s.kw[100] = 339.249;
    const auto m = compute_metrics(s, 457.988);
    REQUIRE(m.reduction_pct.has_value());
    CHECK(std::abs(*m.reduction_pct - 25.93) <= 0.01);
  }

  TEST_CASE("ramps telescope back to the endpoint difference") {
    const auto s = series_of({1.0, 4.0, 2.5, 7.0, 7.0, 3.0});
    const auto m = compute_metrics(s);
    double sum = 0.0;
    for (double r : m.ramp_kw_per_min) sum += r;
    CHECK(sum * s.grid.slot_minutes() == doctest::Approx(s.kw.back() - s.kw.front()));
  }

  TEST_CASE("variance and peak are permutation invariant, ramps are not") {
    auto kw = std::vector<double>{1.0, 9.0, 2.0, 8.0, 3.0, 7.0};
    const auto a = compute_metrics(series_of(kw));
    std::vector<double> shuffled = {9.0, 1.0, 8.0, 2.0, 7.0, 3.0};
    const auto b = compute_metrics(series_of(shuffled));
    CHECK(a.peak_kw == doctest::Approx(b.peak_kw));
    CHECK(a.variance_kw2 == doctest::Approx(b.variance_kw2));
    CHECK(a.ramp_kw_per_min != b.ramp_kw_per_min);
  }

  TEST_CASE("identical trials produce zero-width boxes") {
    const auto s = series_of({2.0, 5.0, 3.0});
    const auto stats = trial_statistics({s, s, s, s});
    for (size_t t = 0; t < 3; ++t) {
      CHECK(stats[t].q1 == doctest::Approx(s.kw[t]));
      CHECK(stats[t].median == doctest::Approx(s.kw[t]));
      CHECK(stats[t].q3 == doctest::Approx(s.kw[t]));
      CHECK(stats[t].whisker_lo == doctest::Approx(s.kw[t]));
      CHECK(stats[t].whisker_hi == doctest::Approx(s.kw[t]));
      CHECK(stats[t].outliers.empty());
    }
  }

  TEST_CASE("two trials bracket the midpoint median") {
    const auto a = series_of({2.0, 8.0});
    const auto b = series_of({4.0, 2.0});
    const auto stats = trial_statistics({a, b});
    CHECK(stats[0].median == doctest::Approx(3.0));
    CHECK(stats[1].median == doctest::Approx(5.0));
  }

  TEST_CASE("box statistics stay within the exhaustive extremes") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> dist(0.0, 50.0);
    std::vector<DemandSeries> trials;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> kw(36);
      for (double& v : kw) v = dist(gen);
      trials.push_back(series_of(std::move(kw)));
    }
    const auto stats = trial_statistics(trials);
    for (size_t t = 0; t < 36; ++t) {
      double lo = trials[0].kw[t], hi = trials[0].kw[t];
      for (const auto& trial : trials) {
        lo = std::min(lo, trial.kw[t]);
        hi = std::max(hi, trial.kw[t]);
      }
      CHECK(stats[t].min == doctest::Approx(lo));
      CHECK(stats[t].max == doctest::Approx(hi));
      CHECK(stats[t].whisker_hi <= hi + 1e-12);
      CHECK(stats[t].whisker_lo >= lo - 1e-12);
      CHECK(stats[t].q1 <= stats[t].median);
      CHECK(stats[t].median <= stats[t].q3);
    }
  }

  TEST_CASE("empty inputs are rejected") {
    CHECK_THROWS_AS(compute_metrics(DemandSeries{TimeGrid{}, {}}), ParameterError);
    CHECK_THROWS_AS(trial_statistics({}), ParameterError);
  }
}
