#pragma once

#include <optional>
#include <vector>

#include "evsched/series.hpp"

namespace evsched {

struct MetricsReport {
  double peak_kw = 0.0;
  int peak_slot = 0;
  std::vector<double> ramp_kw_per_min;  // length S-1
  double ramp_min = 0.0;
  double ramp_max = 0.0;
  double variance_kw2 = 0.0;  // population variance
  std::optional<double> reduction_pct;  // vs. the reference peak, when given
};

MetricsReport compute_metrics(const DemandSeries& series,
                              std::optional<double> reference_peak_kw = std::nullopt);

// Tukey boxplot statistics for one slot across trials. Quartiles use
// linear interpolation; whiskers extend to the most extreme values within
// 1.5 IQR of the quartiles.
struct SlotBoxStats {
  double min = 0.0;  // smallest observation
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;  // largest observation
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;
};

std::vector<SlotBoxStats> trial_statistics(const std::vector<DemandSeries>& per_trial);

}  // namespace evsched
