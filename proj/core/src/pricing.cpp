#include "evsched/pricing.hpp"

#include <algorithm>

#include "evsched/errors.hpp"

namespace evsched {

PriceDirection price_direction_from_string(const std::string& s) {
  if (s == "intended") return PriceDirection::intended;
  if (s == "literal") return PriceDirection::literal;
  throw ParameterError("unknown price direction: " + s);
}

std::string to_string(PriceDirection dir) {
  return dir == PriceDirection::intended ? "intended" : "literal";
}

PriceCurve derive_price_curve(const DemandSeries& desired_ev, double f_min_cents,
                              double f_max_cents, PriceDirection direction) {
  validate_series(desired_ev, "desired_ev");
  if (f_min_cents > f_max_cents)
    throw ParameterError("derive_price_curve: f_min must be <= f_max");

  PriceCurve curve;
  curve.grid = desired_ev.grid;
  curve.f_min = f_min_cents;
  curve.f_max = f_max_cents;
  const auto [lo, hi] = std::minmax_element(desired_ev.kw.begin(), desired_ev.kw.end());
  curve.e_min = *lo;
  curve.e_max = *hi;
  curve.cents_per_kwh.resize(desired_ev.kw.size());

  const double span = curve.e_max - curve.e_min;
  if (span <= 0.0) {
    std::fill(curve.cents_per_kwh.begin(), curve.cents_per_kwh.end(),
              (f_min_cents + f_max_cents) / 2.0);
    return curve;
  }
  const double price_span = f_max_cents - f_min_cents;
  for (size_t t = 0; t < desired_ev.kw.size(); ++t) {
    const double u = (desired_ev.kw[t] - curve.e_min) / span;
    curve.cents_per_kwh[t] = direction == PriceDirection::intended
                                 ? f_max_cents - price_span * u
                                 : f_min_cents + price_span * u;
  }
  return curve;
}

}  // namespace evsched
