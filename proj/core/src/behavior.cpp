#include "evsched/behavior.hpp"

#include <algorithm>
#include <cmath>

#include "evsched/errors.hpp"
#include "evsched/rng.hpp"

namespace evsched {

bool AvailabilityMask::contains(int slot) const {
  return std::binary_search(slots.begin(), slots.end(), slot);
}

ChargingFrequency estimate_frequency(const EvProfile& ev) {
  if (ev.historical.empty())
    throw ParameterError("estimate_frequency: ev " + std::to_string(ev.id) +
                         " has no observed days");
  const int s = ev.historical.front().grid.slots;
  ChargingFrequency cf;
  cf.ev_id = ev.id;
  cf.freq.assign(static_cast<size_t>(s), 0.0);
  for (const auto& day : ev.historical) {
    if (static_cast<int>(day.kw.size()) != s)
      throw ParameterError("estimate_frequency: ragged history for ev " + std::to_string(ev.id));
    for (int t = 0; t < s; ++t)
      if (day.kw[t] > 0.0) cf.freq[t] += 1.0;
  }
  const double days = static_cast<double>(ev.historical.size());
  for (double& f : cf.freq) f /= days;
  return cf;
}

AvailabilityMask sample_availability(const ChargingFrequency& freq, double tau,
                                     double e_required_kwh, double p_max_kw,
                                     const TimeGrid& grid, std::uint64_t seed) {
  if (!(tau > 0.0) || tau > 1.0)
    throw ParameterError("sample_availability: tau must be in (0, 1]");
  if (static_cast<int>(freq.freq.size()) != grid.slots)
    throw ParameterError("sample_availability: frequency length does not match grid");
  for (double f : freq.freq)
    if (!(f >= 0.0) || f > 1.0 || !std::isfinite(f))
      throw ParameterError("sample_availability: frequencies must lie in [0, 1]");
  const double dt = grid.slot_hours;
  const double day_cap = grid.slots * p_max_kw * dt;
  if (e_required_kwh > day_cap + 1e-9)
    throw InfeasibleError("sample_availability: required energy exceeds the day capacity",
                          day_cap);

  const int s = grid.slots;
  // round-half-up keeps the slot count identical across platforms
  int k = static_cast<int>(std::floor(tau * s + 0.5));
  const int floor_slots =
      e_required_kwh > 0.0 ? static_cast<int>(std::ceil(e_required_kwh / (p_max_kw * dt) - 1e-9))
                           : 0;
  k = std::max(k, floor_slots);
  k = std::min(k, s);

  AvailabilityMask mask;
  mask.ev_id = freq.ev_id;
  mask.tau = tau;
  mask.tau_effective = static_cast<double>(k) / static_cast<double>(s);

  std::vector<double> weights = freq.freq;
  std::vector<char> chosen(static_cast<size_t>(s), 0);
  SeedStream rng(seed);
  for (int pick = 0; pick < k; ++pick) {
    double total = 0.0;
    for (int t = 0; t < s; ++t)
      if (!chosen[t]) total += weights[t];
    int slot = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int t = 0; t < s; ++t) {
        if (chosen[t] || weights[t] <= 0.0) continue;
        acc += weights[t];
        slot = t;
        if (acc > target) break;
      }
    } else {
      // all remaining weight is zero: uniform over unchosen slots
      int remaining = 0;
      for (int t = 0; t < s; ++t)
        if (!chosen[t]) ++remaining;
      auto idx = rng.uniform_int(0, static_cast<std::uint64_t>(remaining - 1));
      for (int t = 0; t < s; ++t) {
        if (chosen[t]) continue;
        if (idx == 0) {
          slot = t;
          break;
        }
        --idx;
      }
    }
    chosen[static_cast<size_t>(slot)] = 1;
    mask.slots.push_back(slot);
  }
  std::sort(mask.slots.begin(), mask.slots.end());
  return mask;
}

}  // namespace evsched
