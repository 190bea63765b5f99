#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsched/series.hpp"

namespace evsched {

enum class DayKind { weekday, weekend };

std::string to_string(DayKind kind);
DayKind day_kind_from_string(const std::string& s);

struct EvProfile {
  int id = 0;                           // unique across the scenario
  double daily_energy_kwh = 0.0;        // energy to schedule per day
  double p_max_kw = 1.92;
  double p_min_kw = 0.96;
  std::vector<DemandSeries> historical; // one series per observed day

  bool operator==(const EvProfile&) const = default;
};

struct Household {
  int id = 0;
  DemandSeries residential;
  std::vector<EvProfile> evs;

  bool operator==(const Household&) const = default;
};

struct CommunityScenario {
  TimeGrid grid;
  DayKind day_kind = DayKind::weekday;
  std::uint64_t seed = 0;
  int observed_days = 0;
  std::vector<Household> households;

  int ev_count() const;
  double total_ev_energy_kwh() const;
  // Pointers in ascending EV id order; stable iteration order for the
  // whole pipeline.
  std::vector<const EvProfile*> all_evs() const;

  bool operator==(const CommunityScenario&) const = default;
};

struct SynthesisParams {
  int n_households = 200;
  double evs_per_household_mean = 1.28;
  int observed_days = 365;
  std::uint64_t seed = 5;
  DayKind day_kind = DayKind::weekday;
};

// Seeded stand-in for a measured community: residential profiles with a
// morning bump and a dominant 18:00-20:00 evening peak, EVs arriving in
// the evening and charging at p_max until their daily energy is delivered.
// Deterministic for a fixed parameter set.
CommunityScenario synthesize_community(const SynthesisParams& params);

// Per-slot sum of household residential demand.
DemandSeries aggregate_residential(const CommunityScenario& scenario);

// Per-slot sum of historical EV charging for one observed day.
DemandSeries aggregate_ev_baseline(const CommunityScenario& scenario, int day_index);

void validate_scenario(const CommunityScenario& scenario);

}  // namespace evsched
