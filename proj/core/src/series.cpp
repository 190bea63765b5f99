#include "evsched/series.hpp"

#include <cmath>

#include "evsched/errors.hpp"

namespace evsched {

TimeGrid TimeGrid::with_slots(int slots) {
  if (slots < 1) throw ParameterError("TimeGrid: slots must be >= 1");
  TimeGrid g;
  g.slots = slots;
  g.slot_hours = 24.0 / static_cast<double>(slots);
  return g;
}

TimeGrid TimeGrid::from_slot_minutes(int slots, double slot_minutes) {
  TimeGrid g;
  g.slots = slots;
  g.slot_hours = slot_minutes / 60.0;
  validate_grid(g);
  return g;
}

void validate_grid(const TimeGrid& grid) {
  if (grid.slots < 1) throw ParameterError("TimeGrid: slots must be >= 1");
  double day = grid.slots * grid.slot_hours;
  if (std::abs(day - 24.0) > 24.0 * 1e-12)
    throw ParameterError("TimeGrid: slots * slot_hours must equal 24 h, got " +
                         std::to_string(day));
}

double DemandSeries::energy_kwh() const {
  double sum = 0.0;
  for (double v : kw) sum += v;
  return sum * grid.slot_hours;
}

DemandSeries zero_series(const TimeGrid& grid) {
  return DemandSeries{grid, std::vector<double>(static_cast<size_t>(grid.slots), 0.0)};
}

void validate_series(const DemandSeries& series, const std::string& what) {
  validate_grid(series.grid);
  if (series.kw.size() != static_cast<size_t>(series.grid.slots))
    throw ParameterError(what + ": length " + std::to_string(series.kw.size()) +
                         " does not match grid slots " + std::to_string(series.grid.slots));
  for (size_t t = 0; t < series.kw.size(); ++t) {
    double v = series.kw[t];
    if (!std::isfinite(v) || v < 0.0)
      throw ParameterError(what + ": value at slot " + std::to_string(t) +
                           " must be finite and >= 0, got " + std::to_string(v));
  }
}

DemandSeries add_series(const DemandSeries& a, const DemandSeries& b) {
  if (a.grid != b.grid || a.kw.size() != b.kw.size())
    throw ParameterError("add_series: mismatched grids");
  DemandSeries out = a;
  for (size_t t = 0; t < out.kw.size(); ++t) out.kw[t] += b.kw[t];
  return out;
}

}  // namespace evsched
