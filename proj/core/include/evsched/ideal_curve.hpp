#pragma once

#include "evsched/series.hpp"

namespace evsched {

// Result of flattening the aggregate curve by moving all EV energy out of
// a contiguous window around the residential peak. Slot indices are
// 0-based; the window spans [peak_slot - s1 + 1, peak_slot + s2] inclusive
// and is empty when s1 = s2 = 0.
struct IdealCurveResult {
  int s1 = 0;
  int s2 = 0;
  int peak_slot = 0;          // H, argmax of the residential aggregate
  double flat_level_kw = 0.0; // L, common level outside the window
  DemandSeries desired_ev;    // E_t, zero inside the window
  DemandSeries ideal_total;   // X_t inside the window, L outside
  bool feasible = false;

  bool in_window(int t) const { return t > peak_slot - s1 && t <= peak_slot + s2; }
};

// Smallest index attaining the maximum (earliest tie-break).
int peak_index(const DemandSeries& residential_total);

// Minimizes s1 + s2 over all windows around the peak such that the flat
// level outside the window sits at or above every outside value. Ties are
// broken by smaller flat level, then smaller s1. total_ev_energy = 0
// returns the identity result (empty window, desired_ev all zero).
IdealCurveResult solve_ideal_curve(const DemandSeries& residential_total,
                                   double total_ev_energy_kwh);

// max(ideal_total) = max(X at the peak slot, flat level).
double ideal_peak(const IdealCurveResult& result);

}  // namespace evsched
