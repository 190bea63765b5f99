#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evsched/behavior.hpp"
#include "evsched/community.hpp"
#include "evsched/pricing.hpp"
#include "evsched/series.hpp"

namespace evsched {

// One EV's day-ahead cost minimization: deliver e_required within the
// availability mask, power either zero or in [p_min, p_max], and once
// charging switches off it stays off for min_off_slots further slots.
struct SchedulingProblem {
  TimeGrid grid;
  std::vector<double> price_cents_per_kwh;  // length S
  AvailabilityMask mask;
  double e_required_kwh = 0.0;
  double p_min_kw = 0.96;
  double p_max_kw = 1.92;
  int min_off_slots = 3;  // T_off-on expressed in slots

  static SchedulingProblem for_ev(const EvProfile& ev, const PriceCurve& prices,
                                  AvailabilityMask mask, int t_off_on_minutes);
};

void validate_problem(const SchedulingProblem& problem);

// Converts a minimum off-on interval in minutes to slots; the interval
// must be an integer multiple of the slot duration.
int off_slots_from_minutes(const TimeGrid& grid, double minutes);

struct ChargeSchedule {
  int ev_id = 0;
  std::vector<double> power_kw;        // length S
  std::vector<std::uint8_t> status;    // length S, 1 while charging
  double cost_cents = 0.0;
  bool optimal = false;
  double gap = 0.0;
};

struct FillResult {
  std::vector<double> power_kw;  // length S
  double cost_cents = 0.0;
};

// Cheapest continuous fill for a fixed on-set: every on slot at p_min,
// then topped up to p_max in ascending (price, slot) order. Returns
// nothing when the on-set cannot hold the required energy. Cost terms are
// accumulated in the same (price, slot) order so identical on-sets
// produce bit-identical costs everywhere this is used.
std::optional<FillResult> greedy_fill(const SchedulingProblem& problem,
                                      const std::vector<int>& on_slots);

// Largest number of on slots a mask admits under the switching rule.
int max_on_slots(const SchedulingProblem& problem);

// Largest energy deliverable within the mask and switching rule.
double max_deliverable_kwh(const SchedulingProblem& problem);

bool problem_is_feasible(const SchedulingProblem& problem);

// Exact solver: branch and bound on the on/off variables with a bounded
// simplex LP relaxation bound and greedy-fill leaf evaluation. Throws
// InfeasibleError (with the deliverable-energy certificate) when no
// schedule exists.
ChargeSchedule solve_schedule(const SchedulingProblem& problem);

// Test oracle: enumerates every on/off subset of the mask. Refuses masks
// with more than 20 slots.
ChargeSchedule brute_force_schedule(const SchedulingProblem& problem);

struct CommunityScheduleResult {
  std::vector<ChargeSchedule> schedules;  // ev id order, one per mask
  DemandSeries ev_total;
  DemandSeries combined_total;  // residential + optimized EV charging
};

// Charger parameters applied to every scheduled EV.
struct ScheduleParams {
  double p_min_kw = 0.96;
  double p_max_kw = 1.92;
  int t_off_on_minutes = 30;
};

// Solves each masked EV independently (day-ahead prices are fixed, so
// there is no coupling) and aggregates. threads = 0 uses the hardware
// count; results are reduced in EV id order regardless of thread timing.
CommunityScheduleResult schedule_community(const CommunityScenario& scenario,
                                           const PriceCurve& prices,
                                           const std::vector<AvailabilityMask>& masks,
                                           const ScheduleParams& params = {}, int threads = 0);

}  // namespace evsched
