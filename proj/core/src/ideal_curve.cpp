#include "evsched/ideal_curve.hpp"

#include <algorithm>
#include <limits>

#include "evsched/errors.hpp"

namespace evsched {

int peak_index(const DemandSeries& residential_total) {
  if (residential_total.kw.empty()) throw ParameterError("peak_index: empty series");
  int best = 0;
  for (int t = 1; t < static_cast<int>(residential_total.kw.size()); ++t)
    if (residential_total.kw[t] > residential_total.kw[best]) best = t;
  return best;
}

IdealCurveResult solve_ideal_curve(const DemandSeries& residential_total,
                                   double total_ev_energy_kwh) {
  validate_series(residential_total, "residential_total");
  if (total_ev_energy_kwh < 0.0)
    throw ParameterError("solve_ideal_curve: total EV energy must be >= 0");

  const auto& x = residential_total.kw;
  const int s = residential_total.grid.slots;
  const double dt = residential_total.grid.slot_hours;
  const int h = peak_index(residential_total);

  IdealCurveResult res;
  res.peak_slot = h;
  res.desired_ev = zero_series(residential_total.grid);
  res.ideal_total = residential_total;

  if (total_ev_energy_kwh == 0.0) {
    res.s1 = res.s2 = 0;
    res.flat_level_kw = 0.0;
    res.feasible = true;
    return res;
  }

  // prefix[i] = sum of x[0..i); pmax[j] = max of x[0..j]; smax[j] = max of x[j..S).
  std::vector<double> prefix(static_cast<size_t>(s) + 1, 0.0);
  for (int t = 0; t < s; ++t) prefix[t + 1] = prefix[t] + x[t];
  std::vector<double> pmax(static_cast<size_t>(s), 0.0);
  std::vector<double> smax(static_cast<size_t>(s) + 1, -std::numeric_limits<double>::infinity());
  pmax[0] = x[0];
  for (int t = 1; t < s; ++t) pmax[t] = std::max(pmax[t - 1], x[t]);
  for (int t = s - 1; t >= 0; --t) smax[t] = std::max(smax[t + 1], x[t]);

  const double w = total_ev_energy_kwh / dt;  // energy expressed as summed kW
  const int max_s1 = h;
  const int max_s2 = s - 1 - h;

  for (int total = 0; total <= max_s1 + max_s2; ++total) {
    bool found = false;
    double best_level = 0.0;
    int best_s1 = 0;
    const int lo = std::max(0, total - max_s2);
    const int hi = std::min(total, max_s1);
    for (int s1 = lo; s1 <= hi; ++s1) {
      const int s2 = total - s1;
      const int left_end = h - s1;        // outside-left covers [0, left_end]
      const int right_begin = h + s2 + 1; // outside-right covers [right_begin, S)
      const double outside_sum =
          prefix[left_end + 1] + (prefix[s] - prefix[std::min(right_begin, s)]);
      const double level = (w + outside_sum) / static_cast<double>(s - total);
      double outside_max = pmax[left_end];
      if (right_begin < s) outside_max = std::max(outside_max, smax[right_begin]);
      if (level >= outside_max && (!found || level < best_level)) {
        found = true;
        best_level = level;
        best_s1 = s1;
      }
    }
    if (found) {
      res.s1 = best_s1;
      res.s2 = total - best_s1;
      res.flat_level_kw = best_level;
      res.feasible = true;
      for (int t = 0; t < s; ++t) {
        if (res.in_window(t)) continue;
        res.desired_ev.kw[t] = std::max(0.0, best_level - x[t]);
        res.ideal_total.kw[t] = best_level;
      }
      return res;
    }
  }

  res.feasible = false;  // unreachable for positive energy, kept as a guard
  return res;
}

double ideal_peak(const IdealCurveResult& result) {
  return std::max(result.ideal_total.kw[static_cast<size_t>(result.peak_slot)],
                  result.flat_level_kw);
}

}  // namespace evsched
