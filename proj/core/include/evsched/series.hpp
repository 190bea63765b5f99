#pragma once

#include <string>
#include <vector>

namespace evsched {

// Fixed day grid. slots * slot_hours must equal 24 h; the factories keep
// that true by construction and validate() re-checks it on loaded data.
struct TimeGrid {
  int slots = 144;
  double slot_hours = 24.0 / 144.0;

  static TimeGrid with_slots(int slots);
  static TimeGrid from_slot_minutes(int slots, double slot_minutes);

  double slot_minutes() const { return slot_hours * 60.0; }
  bool operator==(const TimeGrid&) const = default;
};

void validate_grid(const TimeGrid& grid);

// Per-slot power in kW on a TimeGrid. Used for household demand, EV
// charging days, aggregates, and desired EV allocations alike.
struct DemandSeries {
  TimeGrid grid;
  std::vector<double> kw;

  double energy_kwh() const;
  bool operator==(const DemandSeries&) const = default;
};

DemandSeries zero_series(const TimeGrid& grid);

// Throws ParameterError when the length disagrees with the grid or any
// value is negative or non-finite. `what` names the series in messages.
void validate_series(const DemandSeries& series, const std::string& what);

DemandSeries add_series(const DemandSeries& a, const DemandSeries& b);

}  // namespace evsched
