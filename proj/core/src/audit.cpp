#include "evsched/audit.hpp"

#include <cmath>
#include <cstdio>

namespace evsched {

namespace {

std::string slot_msg(const char* what, int t) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s at slot %d", what, t);
  return buf;
}

}  // namespace

std::vector<std::string> audit_schedule(const SchedulingProblem& problem,
                                        const ChargeSchedule& schedule) {
  std::vector<std::string> violations;
  const int s = problem.grid.slots;
  const double dt = problem.grid.slot_hours;

  if (static_cast<int>(schedule.power_kw.size()) != s ||
      static_cast<int>(schedule.status.size()) != s) {
    violations.push_back("schedule length does not match the grid");
    return violations;
  }

  std::vector<char> available(static_cast<size_t>(s), 0);
  for (int t : problem.mask.slots)
    if (t >= 0 && t < s) available[static_cast<size_t>(t)] = 1;

  double energy = 0.0;
  double cost = 0.0;
  for (int t = 0; t < s; ++t) {
    const double pw = schedule.power_kw[static_cast<size_t>(t)];
    const int on = schedule.status[static_cast<size_t>(t)] ? 1 : 0;
    if (pw < 0.0 || !std::isfinite(pw)) violations.push_back(slot_msg("negative power", t));
    if ((pw > 0.0) != (on == 1))
      violations.push_back(slot_msg("status does not match power", t));
    if (on == 1 && (pw < problem.p_min_kw - 1e-9 || pw > problem.p_max_kw + 1e-9))
      violations.push_back(slot_msg("power outside [p_min, p_max]", t));
    if (pw > 0.0 && !available[static_cast<size_t>(t)])
      violations.push_back(slot_msg("charging outside the availability mask", t));
    energy += pw * dt;
    cost += pw * dt * problem.price_cents_per_kwh[static_cast<size_t>(t)];
  }

  if (std::abs(energy - problem.e_required_kwh) > 1e-6)
    violations.push_back("energy balance violated: delivered " + std::to_string(energy) +
                         " kWh, required " + std::to_string(problem.e_required_kwh));

  // switching: Y[t-1] - Y[t] + Y[t+k] <= 1 for every valid (t, k)
  for (int t = 1; t < s; ++t) {
    for (int k = 1; k <= problem.min_off_slots && t + k < s; ++k) {
      const int lhs = (schedule.status[static_cast<size_t>(t - 1)] ? 1 : 0) -
                      (schedule.status[static_cast<size_t>(t)] ? 1 : 0) +
                      (schedule.status[static_cast<size_t>(t + k)] ? 1 : 0);
      if (lhs > 1)
        violations.push_back(slot_msg("off-on interval shorter than the minimum", t));
    }
  }

  if (std::abs(cost - schedule.cost_cents) > 1e-9 * std::max(1.0, std::abs(cost)))
    violations.push_back("reported cost " + std::to_string(schedule.cost_cents) +
                         " does not match recomputed " + std::to_string(cost));
  return violations;
}

}  // namespace evsched
