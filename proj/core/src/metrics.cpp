#include "evsched/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "evsched/errors.hpp"

namespace evsched {

MetricsReport compute_metrics(const DemandSeries& series,
                              std::optional<double> reference_peak_kw) {
  if (series.kw.empty()) throw ParameterError("compute_metrics: empty series");
  MetricsReport r;
  const int s = static_cast<int>(series.kw.size());
  r.peak_slot = 0;
  for (int t = 1; t < s; ++t)
    if (series.kw[static_cast<size_t>(t)] > series.kw[static_cast<size_t>(r.peak_slot)])
      r.peak_slot = t;
  r.peak_kw = series.kw[static_cast<size_t>(r.peak_slot)];

  const double minutes = series.grid.slot_minutes();
  r.ramp_kw_per_min.resize(static_cast<size_t>(std::max(0, s - 1)));
  for (int t = 0; t + 1 < s; ++t)
    r.ramp_kw_per_min[static_cast<size_t>(t)] =
        (series.kw[static_cast<size_t>(t + 1)] - series.kw[static_cast<size_t>(t)]) / minutes;
  if (!r.ramp_kw_per_min.empty()) {
    const auto [lo, hi] =
        std::minmax_element(r.ramp_kw_per_min.begin(), r.ramp_kw_per_min.end());
    r.ramp_min = *lo;
    r.ramp_max = *hi;
  }

  double mean = 0.0;
  for (double v : series.kw) mean += v;
  mean /= s;
  double var = 0.0;
  for (double v : series.kw) var += (v - mean) * (v - mean);
  r.variance_kw2 = var / s;  // full day observed, population variance

  if (reference_peak_kw)
    r.reduction_pct = 100.0 * (*reference_peak_kw - r.peak_kw) / *reference_peak_kw;
  return r;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const size_t i = static_cast<size_t>(pos);
  if (i + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(i);
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

}  // namespace

std::vector<SlotBoxStats> trial_statistics(const std::vector<DemandSeries>& per_trial) {
  if (per_trial.empty()) throw ParameterError("trial_statistics: at least one trial required");
  const int s = static_cast<int>(per_trial.front().kw.size());
  for (const auto& trial : per_trial)
    if (static_cast<int>(trial.kw.size()) != s)
      throw ParameterError("trial_statistics: ragged trial lengths");

  std::vector<SlotBoxStats> stats(static_cast<size_t>(s));
  std::vector<double> values(per_trial.size());
  for (int t = 0; t < s; ++t) {
    for (size_t i = 0; i < per_trial.size(); ++i)
      values[i] = per_trial[i].kw[static_cast<size_t>(t)];
    std::sort(values.begin(), values.end());
    SlotBoxStats& b = stats[static_cast<size_t>(t)];
    b.min = values.front();
    b.max = values.back();
    b.q1 = quantile(values, 0.25);
    b.median = quantile(values, 0.5);
    b.q3 = quantile(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.max;
    b.whisker_hi = b.min;
    for (double v : values) {
      if (v >= lo_fence && v <= hi_fence) {
        b.whisker_lo = std::min(b.whisker_lo, v);
        b.whisker_hi = std::max(b.whisker_hi, v);
      } else {
        b.outliers.push_back(v);
      }
    }
  }
  return stats;
}

}  // namespace evsched
