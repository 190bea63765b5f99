#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "evsched/community.hpp"
#include "evsched/errors.hpp"
#include "evsched/ideal_curve.hpp"

using namespace evsched;

TEST_SUITE("community") {
  TEST_CASE("single household without EVs") {
    SynthesisParams params;
    params.n_households = 1;
    params.evs_per_household_mean = 0.0;
    params.observed_days = 1;
    params.seed = 7;
    const auto sc = synthesize_community(params);
    CHECK(sc.households.size() == 1);
    CHECK(sc.ev_count() == 0);
    CHECK(sc.households.front().evs.empty());
    validate_scenario(sc);
  }

  TEST_CASE("same seed gives identical scenarios") {
    SynthesisParams params;
    params.n_households = 12;
    params.evs_per_household_mean = 1.0;
    params.observed_days = 5;
    params.seed = 3;
    const auto a = synthesize_community(params);
    const auto b = synthesize_community(params);
    CHECK(a == b);
    params.seed = 4;
    const auto c = synthesize_community(params);
    CHECK_FALSE(a == c);
  }

  TEST_CASE("default-scale community matches the expected structure") {
    SynthesisParams params;  // 200 households, mean 1.28, 365 days
    params.observed_days = 30;
    const auto sc = synthesize_community(params);
    validate_scenario(sc);
    CHECK(sc.households.size() == 200);
    const int m = sc.ev_count();
    CHECK(m > 180);  // Poisson(1.28) x 200 capped at 3, wide guard band
    CHECK(m < 340);
    for (const auto* ev : sc.all_evs()) {
      CHECK(ev->daily_energy_kwh >= 4.0);
      CHECK(ev->daily_energy_kwh <= 10.0);
      CHECK(ev->p_max_kw == doctest::Approx(1.92));
    }
  }

  TEST_CASE("aggregate residential peak lands in the evening window") {
    for (std::uint64_t seed : {1ull, 2ull, 17ull, 123456789ull}) {
      SynthesisParams params;
      params.n_households = 50;
      params.observed_days = 1;
      params.seed = seed;
      const auto sc = synthesize_community(params);
      const int peak = peak_index(aggregate_residential(sc));
      INFO("seed ", seed, " peak slot ", peak);
      CHECK(peak >= 108);  // 18:00
      CHECK(peak <= 120);  // 20:00
    }
  }

  TEST_CASE("per-day charging energy equals the daily draw unless cut at midnight") {
    SynthesisParams params;
    params.n_households = 30;
    params.evs_per_household_mean = 1.5;
    params.observed_days = 20;
    params.seed = 11;
    const auto sc = synthesize_community(params);
    int full_days = 0;
    for (const auto* ev : sc.all_evs()) {
      for (const auto& day : ev->historical) {
        for (double v : day.kw) {
          if (v != 0.0) {
            CHECK(v >= ev->p_min_kw - 1e-9);
            CHECK(v <= ev->p_max_kw + 1e-9);
          }
        }
        const bool truncated = day.kw.back() > 0.0;
        if (!truncated) {
          CHECK(std::abs(day.energy_kwh() - ev->daily_energy_kwh) <= 1e-6);
          ++full_days;
        } else {
          CHECK(day.energy_kwh() <= ev->daily_energy_kwh + 1e-6);
        }
      }
    }
    CHECK(full_days > 0);
  }

  TEST_CASE("aggregation identities") {
    SynthesisParams params;
    params.n_households = 2;
    params.observed_days = 2;
    params.evs_per_household_mean = 1.0;
    params.seed = 21;
    auto sc = synthesize_community(params);

    SUBCASE("single household aggregates to itself") {
      CommunityScenario one = sc;
      one.households.resize(1);
      CHECK(aggregate_residential(one).kw == one.households[0].residential.kw);
    }

    SUBCASE("two toy series add per slot") {
      TimeGrid g = TimeGrid::with_slots(2);
      CommunityScenario toy;
      toy.grid = g;
      toy.observed_days = 1;
      toy.households.resize(2);
      toy.households[0].id = 0;
      toy.households[0].residential = DemandSeries{g, {1.0, 2.0}};
      toy.households[1].id = 1;
      toy.households[1].residential = DemandSeries{g, {3.0, 4.0}};
      CHECK(aggregate_residential(toy).kw == std::vector<double>{4.0, 6.0});

      EvProfile a;
      a.id = 0;
      a.historical = {DemandSeries{g, {1.0, 0.0}}};
      EvProfile b;
      b.id = 1;
      b.historical = {DemandSeries{g, {0.5, 1.5}}};
      toy.households[0].evs.push_back(a);
      toy.households[1].evs.push_back(b);
      CHECK(aggregate_ev_baseline(toy, 0).kw == std::vector<double>{1.5, 1.5});

      CommunityScenario one = toy;
      one.households.resize(1);
      CHECK(aggregate_ev_baseline(one, 0).kw == a.historical[0].kw);
    }

    SUBCASE("aggregates match a naive double loop") {
      SynthesisParams big = params;
      big.n_households = 200;
      big.evs_per_household_mean = 1.28;
      big.observed_days = 3;
      big.seed = 1;
      const auto full = synthesize_community(big);
      const auto res = aggregate_residential(full);
      const auto ev0 = aggregate_ev_baseline(full, 0);
      for (int t = 0; t < full.grid.slots; ++t) {
        double res_sum = 0.0, ev_sum = 0.0;
        for (const auto& h : full.households) {
          res_sum += h.residential.kw[static_cast<size_t>(t)];
          for (const auto& ev : h.evs) ev_sum += ev.historical[0].kw[static_cast<size_t>(t)];
        }
        CHECK(std::abs(res.kw[static_cast<size_t>(t)] - res_sum) <= 1e-9);
        CHECK(std::abs(ev0.kw[static_cast<size_t>(t)] - ev_sum) <= 1e-9);
      }
    }

    SUBCASE("aggregation is additive over household partitions") {
      const auto whole = aggregate_residential(sc);
      CommunityScenario left = sc, right = sc;
      left.households.resize(1);
      right.households.erase(right.households.begin());
      const auto a = aggregate_residential(left);
      const auto b = aggregate_residential(right);
      for (int t = 0; t < sc.grid.slots; ++t)
        CHECK(whole.kw[static_cast<size_t>(t)] ==
              doctest::Approx(a.kw[static_cast<size_t>(t)] + b.kw[static_cast<size_t>(t)]));
    }
  }

  TEST_CASE("bad parameters are rejected") {
    SynthesisParams params;
    params.n_households = 0;
    CHECK_THROWS_AS(synthesize_community(params), ParameterError);
    params.n_households = 1;
    params.observed_days = 0;
    CHECK_THROWS_AS(synthesize_community(params), ParameterError);
  }

  TEST_CASE("baseline day index is range-checked") {
    SynthesisParams params;
    params.n_households = 2;
    params.observed_days = 3;
    const auto sc = synthesize_community(params);
    CHECK_THROWS_AS(aggregate_ev_baseline(sc, 3), ParameterError);
    CHECK_THROWS_AS(aggregate_ev_baseline(sc, -1), ParameterError);
  }
}
