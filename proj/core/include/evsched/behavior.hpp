#pragma once

#include <cstdint>
#include <vector>

#include "evsched/community.hpp"
#include "evsched/series.hpp"

namespace evsched {

// Fraction of observed days with charging active per slot.
struct ChargingFrequency {
  int ev_id = 0;
  std::vector<double> freq;
};

struct AvailabilityMask {
  int ev_id = 0;
  std::vector<int> slots;     // sorted ascending, no duplicates
  double tau = 0.0;           // requested comfort tolerance
  double tau_effective = 0.0; // |slots| / S after the feasibility floor

  bool contains(int slot) const;
};

ChargingFrequency estimate_frequency(const EvProfile& ev);

// Draws K = max(round(tau*S), ceil(e_required/(p_max*dt))) distinct slots by
// roulette-wheel sampling without replacement, weight proportional to the
// charging frequency. Zero-weight slots are drawn uniformly only once every
// positive-weight slot is exhausted. Deterministic for a fixed seed.
AvailabilityMask sample_availability(const ChargingFrequency& freq, double tau,
                                     double e_required_kwh, double p_max_kw,
                                     const TimeGrid& grid, std::uint64_t seed);

}  // namespace evsched
