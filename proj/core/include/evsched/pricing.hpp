#pragma once

#include "evsched/series.hpp"

namespace evsched {

// The intended direction prices low where desired EV charging is high.
// literal keeps the opposite (increasing) mapping for comparison runs.
enum class PriceDirection { intended, literal };

PriceDirection price_direction_from_string(const std::string& s);
std::string to_string(PriceDirection dir);

struct PriceCurve {
  TimeGrid grid;
  std::vector<double> cents_per_kwh;
  double f_min = 0.0;
  double f_max = 0.0;
  // normalization bounds actually used (min/max of the input series, kW)
  double e_min = 0.0;
  double e_max = 0.0;

  bool operator==(const PriceCurve&) const = default;
};

// Normalizes the desired EV allocation into [f_min, f_max]. A constant
// input degenerates to the average of the bounds on every slot.
PriceCurve derive_price_curve(const DemandSeries& desired_ev, double f_min_cents,
                              double f_max_cents,
                              PriceDirection direction = PriceDirection::intended);

}  // namespace evsched
