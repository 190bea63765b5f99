#include "evsched/community.hpp"

#include <algorithm>
#include <cmath>

#include "evsched/errors.hpp"
#include "evsched/rng.hpp"

namespace evsched {

std::string to_string(DayKind kind) {
  return kind == DayKind::weekday ? "weekday" : "weekend";
}

DayKind day_kind_from_string(const std::string& s) {
  if (s == "weekday") return DayKind::weekday;
  if (s == "weekend") return DayKind::weekend;
  throw ParameterError("unknown day kind: " + s);
}

int CommunityScenario::ev_count() const {
  int n = 0;
  for (const auto& h : households) n += static_cast<int>(h.evs.size());
  return n;
}

double CommunityScenario::total_ev_energy_kwh() const {
  double e = 0.0;
  for (const auto& h : households)
    for (const auto& ev : h.evs) e += ev.daily_energy_kwh;
  return e;
}

std::vector<const EvProfile*> CommunityScenario::all_evs() const {
  std::vector<const EvProfile*> evs;
  for (const auto& h : households)
    for (const auto& ev : h.evs) evs.push_back(&ev);
  std::sort(evs.begin(), evs.end(),
            [](const EvProfile* a, const EvProfile* b) { return a->id < b->id; });
  return evs;
}

namespace {

constexpr double kLevel1ChargeKw = 1.92;  // Level 1 residential charging
constexpr double kMinChargeKw = 0.96;

double slot_of_clock(double hours, const TimeGrid& grid) {
  return hours / grid.slot_hours;
}

DemandSeries synth_residential(const TimeGrid& grid, DayKind kind, SeedStream& rng) {
  // Two smooth bumps over a positive base. The evening bump is drawn 2-3x
  // taller than the morning one so the aggregate peak stays in the
  // 18:00-20:00 window. Weekends flatten the morning commute bump and
  // shift it later.
  const double morning_center = rng.normal(slot_of_clock(7.5, grid), 3.0);
  const double evening_center =
      std::clamp(rng.normal(slot_of_clock(19.0, grid), 2.0),
                 slot_of_clock(18.4, grid), slot_of_clock(19.6, grid));
  const double morning_width = rng.uniform(6.0, 10.0);
  const double evening_width = rng.uniform(7.0, 11.0);
  // evening demand decays slowly toward midnight (lighting, media), so
  // the right flank is much wider than the left
  const double evening_tail = evening_width * rng.uniform(2.2, 2.6);
  double morning_amp = rng.uniform(0.6, 0.8);
  const double evening_amp = morning_amp * rng.uniform(2.2, 2.8);
  const double base = rng.uniform(0.28, 0.42);

  double m_center = morning_center;
  if (kind == DayKind::weekend) {
    m_center += slot_of_clock(1.5, grid);  // later start
    morning_amp *= 0.7;
  }

  DemandSeries s = zero_series(grid);
  for (int t = 0; t < grid.slots; ++t) {
    double dm = (t - m_center) / morning_width;
    double de = (t - evening_center) / (t <= evening_center ? evening_width : evening_tail);
    double v = base + morning_amp * std::exp(-0.5 * dm * dm) +
               evening_amp * std::exp(-0.5 * de * de);
    // small measurement-style jitter, kept well below the evening bump
    v *= 1.0 + 0.03 * (rng.uniform() - 0.5);
    s.kw[t] = std::max(0.0, v);
  }
  return s;
}

// One observed day of charging: start at the arrival slot, run at p_max
// until the daily energy is delivered. A remainder shorter than a p_min
// slot is folded into the last two slots so every nonzero value stays in
// [p_min, p_max]. Runs are cut at midnight; the shortfall is tolerated in
// historical data. arrival_mean_slot carries the per-EV habit; combined
// with the per-day spread the arrival marginal stays the truncated normal
// with mean 18:30 and sd 1.5 h.
DemandSeries synth_charging_day(const TimeGrid& grid, double energy_kwh, double p_min,
                                double p_max, double arrival_mean_slot, SeedStream& rng) {
  DemandSeries day = zero_series(grid);
  const double dt = grid.slot_hours;
  const double lo = slot_of_clock(12.0, grid);
  const double hi = static_cast<double>(grid.slots - 1);
  int arrival = static_cast<int>(
      std::floor(rng.truncated_normal(arrival_mean_slot, 1.2 / grid.slot_hours, lo, hi)));
  arrival = std::clamp(arrival, 0, grid.slots - 1);

  const double slot_energy = p_max * dt;
  int n_full = static_cast<int>(std::floor(energy_kwh / slot_energy + 1e-12));
  double rem = energy_kwh - n_full * slot_energy;
  if (rem < 1e-12) rem = 0.0;

  std::vector<double> run;  // kW per slot of the charging run
  run.assign(static_cast<size_t>(n_full), p_max);
  if (rem > 0.0) {
    if (rem >= p_min * dt - 1e-12) {
      run.push_back(rem / dt);
    } else if (!run.empty()) {
      // split the last full slot plus the remainder across two slots
      double half = (slot_energy + rem) / 2.0 / dt;
      run.back() = half;
      run.push_back(half);
    } else {
      run.push_back(p_min);  // below-minimum request, round up to p_min
    }
  }

  for (size_t i = 0; i < run.size(); ++i) {
    int t = arrival + static_cast<int>(i);
    if (t >= grid.slots) break;  // no wrap past midnight
    day.kw[t] = run[i];
  }
  return day;
}

}  // namespace

CommunityScenario synthesize_community(const SynthesisParams& params) {
  if (params.n_households < 1)
    throw ParameterError("synthesize_community: n_households must be >= 1");
  if (params.observed_days < 1)
    throw ParameterError("synthesize_community: observed_days must be >= 1");
  if (params.evs_per_household_mean < 0.0)
    throw ParameterError("synthesize_community: evs_per_household_mean must be >= 0");

  CommunityScenario sc;
  sc.grid = TimeGrid{};
  sc.day_kind = params.day_kind;
  sc.seed = params.seed;
  sc.observed_days = params.observed_days;
  sc.households.reserve(static_cast<size_t>(params.n_households));

  const std::uint64_t kind_tag = params.day_kind == DayKind::weekday ? 0 : 1;
  int next_ev_id = 0;
  for (int h = 0; h < params.n_households; ++h) {
    Household house;
    house.id = h;
    SeedStream res_rng(derive_seed(
        params.seed, {seed_tag::kResidential, kind_tag, static_cast<std::uint64_t>(h)}));
    house.residential = synth_residential(sc.grid, params.day_kind, res_rng);

    SeedStream count_rng(
        derive_seed(params.seed, {seed_tag::kEvCount, static_cast<std::uint64_t>(h)}));
    int n_evs = std::min(count_rng.poisson(params.evs_per_household_mean), 3);
    for (int e = 0; e < n_evs; ++e) {
      EvProfile ev;
      ev.id = next_ev_id++;
      ev.p_max_kw = kLevel1ChargeKw;
      ev.p_min_kw = kMinChargeKw;
      SeedStream param_rng(derive_seed(
          params.seed, {seed_tag::kEvParams, static_cast<std::uint64_t>(h),
                        static_cast<std::uint64_t>(e)}));
      ev.daily_energy_kwh = param_rng.uniform(4.0, 10.0);
      // habit component of the arrival time; per-day spread sits on top
      // (0.9^2 + 1.2^2 = 1.5^2 keeps the stated marginal)
      const double arrival_mean = param_rng.normal(18.5 / sc.grid.slot_hours,
                                                   0.9 / sc.grid.slot_hours);
      ev.historical.reserve(static_cast<size_t>(params.observed_days));
      for (int d = 0; d < params.observed_days; ++d) {
        SeedStream day_rng(derive_seed(
            params.seed, {seed_tag::kEvDay, static_cast<std::uint64_t>(h),
                          static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(d)}));
        ev.historical.push_back(synth_charging_day(sc.grid, ev.daily_energy_kwh, ev.p_min_kw,
                                                   ev.p_max_kw, arrival_mean, day_rng));
      }
      house.evs.push_back(std::move(ev));
    }
    sc.households.push_back(std::move(house));
  }
  return sc;
}

DemandSeries aggregate_residential(const CommunityScenario& scenario) {
  DemandSeries total = zero_series(scenario.grid);
  for (const auto& h : scenario.households)
    for (int t = 0; t < scenario.grid.slots; ++t) total.kw[t] += h.residential.kw[t];
  return total;
}

DemandSeries aggregate_ev_baseline(const CommunityScenario& scenario, int day_index) {
  if (day_index < 0 || day_index >= scenario.observed_days)
    throw ParameterError("aggregate_ev_baseline: day_index " + std::to_string(day_index) +
                         " out of range [0, " + std::to_string(scenario.observed_days) + ")");
  DemandSeries total = zero_series(scenario.grid);
  for (const auto& h : scenario.households)
    for (const auto& ev : h.evs)
      for (int t = 0; t < scenario.grid.slots; ++t)
        total.kw[t] += ev.historical[static_cast<size_t>(day_index)].kw[t];
  return total;
}

void validate_scenario(const CommunityScenario& scenario) {
  validate_grid(scenario.grid);
  if (scenario.households.empty())
    throw ParameterError("scenario: at least one household required");
  std::vector<int> house_ids, ev_ids;
  for (const auto& h : scenario.households) {
    house_ids.push_back(h.id);
    validate_series(h.residential, "household " + std::to_string(h.id));
    for (const auto& ev : h.evs) {
      ev_ids.push_back(ev.id);
      if (!(ev.p_min_kw > 0.0) || ev.p_min_kw > ev.p_max_kw)
        throw ParameterError("ev " + std::to_string(ev.id) + ": requires 0 < p_min <= p_max");
      double cap = scenario.grid.slots * scenario.grid.slot_hours * ev.p_max_kw;
      if (ev.daily_energy_kwh < 0.0 || ev.daily_energy_kwh > cap)
        throw ParameterError("ev " + std::to_string(ev.id) +
                             ": daily_energy outside [0, schedulable] range");
      if (static_cast<int>(ev.historical.size()) != scenario.observed_days)
        throw ParameterError("ev " + std::to_string(ev.id) + ": historical day count mismatch");
      for (const auto& day : ev.historical) {
        validate_series(day, "ev " + std::to_string(ev.id) + " history");
        for (double v : day.kw)
          if (v != 0.0 && (v < ev.p_min_kw - 1e-9 || v > ev.p_max_kw + 1e-9))
            throw ParameterError("ev " + std::to_string(ev.id) +
                                 ": history value outside {0} U [p_min, p_max]");
      }
    }
  }
  auto dup = [](std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (dup(house_ids)) throw ParameterError("scenario: duplicate household id");
  if (dup(ev_ids)) throw ParameterError("scenario: duplicate ev id");
}

}  // namespace evsched
