#include "evsched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "evsched/csv_io.hpp"
#include "evsched/errors.hpp"
#include "evsched/rng.hpp"

namespace evsched {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMaskResampleLimit = 10;

// Scheduling parameters come from the config; the EV profile keeps the
// hardware ratings its historical data was generated with.
SchedulingProblem make_problem(const ExperimentConfig& config, const PipelineCore& core,
                               const EvProfile& ev, AvailabilityMask mask) {
  SchedulingProblem p;
  p.grid = core.prices.grid;
  p.price_cents_per_kwh = core.prices.cents_per_kwh;
  p.mask = std::move(mask);
  p.e_required_kwh = ev.daily_energy_kwh;
  p.p_min_kw = config.p_min_kw;
  p.p_max_kw = config.p_max_kw;
  p.min_off_slots = off_slots_from_minutes(core.prices.grid, config.t_off_on_minutes);
  return p;
}

std::string num(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json metrics_to_json(const MetricsReport& m) {
  json j;
  j["peak_kw"] = m.peak_kw;
  j["peak_slot"] = m.peak_slot;
  j["ramp_min_kw_per_min"] = m.ramp_min;
  j["ramp_max_kw_per_min"] = m.ramp_max;
  j["variance_kw2"] = m.variance_kw2;
  if (m.reduction_pct) j["reduction_pct"] = *m.reduction_pct;
  return j;
}

// Fisher-Yates over indices with a dedicated stream; deterministic
// selection of n items out of total.
std::vector<size_t> seeded_subset(size_t total, size_t n, std::uint64_t seed) {
  std::vector<size_t> idx(total);
  for (size_t i = 0; i < total; ++i) idx[i] = i;
  SeedStream rng(seed);
  for (size_t i = total; i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, i - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  idx.resize(std::min(n, total));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

PriceInput price_input_from_string(const std::string& s) {
  if (s == "desired-ev") return PriceInput::desired_ev;
  if (s == "ideal-minus-original") return PriceInput::ideal_minus_original;
  throw ParameterError("unknown price input: " + s);
}

std::string to_string(PriceInput input) {
  return input == PriceInput::desired_ev ? "desired-ev" : "ideal-minus-original";
}

void ExperimentConfig::validate() const {
  if (households < 1) throw ParameterError("config: households must be >= 1");
  if (evs_per_household_mean < 0.0) throw ParameterError("config: evs mean must be >= 0");
  if (observed_days < 1) throw ParameterError("config: observed_days must be >= 1");
  if (!(tau > 0.0) || tau > 1.0) throw ParameterError("config: tau must be in (0, 1]");
  if (f_min_cents > f_max_cents) throw ParameterError("config: f_min must be <= f_max");
  if (!(p_min_kw > 0.0) || p_min_kw > p_max_kw)
    throw ParameterError("config: requires 0 < p_min <= p_max");
  if (t_off_on_minutes < 0) throw ParameterError("config: t_off_on must be >= 0");
  if (trials < 1) throw ParameterError("config: trials must be >= 1");
  for (double f : size_fractions)
    if (!(f > 0.0) || f > 1.0) throw ParameterError("config: size fractions must be in (0, 1]");
  for (double f : participation_fractions)
    if (!(f >= 0.0) || f > 1.0)
      throw ParameterError("config: participation fractions must be in [0, 1]");
  if (threads < 0) throw ParameterError("config: threads must be >= 0");
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("households")) c.households = j["households"].get<int>();
    if (j.contains("evs_per_household_mean"))
      c.evs_per_household_mean = j["evs_per_household_mean"].get<double>();
    if (j.contains("observed_days")) c.observed_days = j["observed_days"].get<int>();
    if (j.contains("day_kind")) c.day_kind = day_kind_from_string(j["day_kind"].get<std::string>());
    if (j.contains("tau")) c.tau = j["tau"].get<double>();
    if (j.contains("f_min_cents")) c.f_min_cents = j["f_min_cents"].get<double>();
    if (j.contains("f_max_cents")) c.f_max_cents = j["f_max_cents"].get<double>();
    if (j.contains("price_direction"))
      c.price_direction = price_direction_from_string(j["price_direction"].get<std::string>());
    if (j.contains("price_input"))
      c.price_input = price_input_from_string(j["price_input"].get<std::string>());
    if (j.contains("p_max_kw")) c.p_max_kw = j["p_max_kw"].get<double>();
    if (j.contains("p_min_kw")) c.p_min_kw = j["p_min_kw"].get<double>();
    if (j.contains("t_off_on_minutes")) c.t_off_on_minutes = j["t_off_on_minutes"].get<int>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("size_fractions"))
      c.size_fractions = j["size_fractions"].get<std::vector<double>>();
    if (j.contains("participation_fractions"))
      c.participation_fractions = j["participation_fractions"].get<std::vector<double>>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

std::string config_to_json_text(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["households"] = c.households;
  j["evs_per_household_mean"] = c.evs_per_household_mean;
  j["observed_days"] = c.observed_days;
  j["day_kind"] = to_string(c.day_kind);
  j["tau"] = c.tau;
  j["f_min_cents"] = c.f_min_cents;
  j["f_max_cents"] = c.f_max_cents;
  j["price_direction"] = to_string(c.price_direction);
  j["price_input"] = to_string(c.price_input);
  j["p_max_kw"] = c.p_max_kw;
  j["p_min_kw"] = c.p_min_kw;
  j["t_off_on_minutes"] = c.t_off_on_minutes;
  j["trials"] = c.trials;
  j["size_fractions"] = c.size_fractions;
  j["participation_fractions"] = c.participation_fractions;
  j["threads"] = c.threads;
  return j.dump(2);
}

PipelineCore compute_core(const ExperimentConfig& config, const CommunityScenario& scenario) {
  PipelineCore core;
  core.residential_total = aggregate_residential(scenario);
  core.ev_baseline_total = scenario.observed_days > 0 ? aggregate_ev_baseline(scenario, 0)
                                                      : zero_series(scenario.grid);
  core.original_total = add_series(core.residential_total, core.ev_baseline_total);
  // the energy the scheduler must place, not the (possibly truncated)
  // historical draw, budgets the ideal curve
  core.total_ev_energy_kwh = scenario.total_ev_energy_kwh();
  core.ideal = solve_ideal_curve(core.residential_total, core.total_ev_energy_kwh);

  DemandSeries price_basis = core.ideal.desired_ev;
  if (config.price_input == PriceInput::ideal_minus_original) {
    price_basis = zero_series(scenario.grid);
    for (int t = 0; t < scenario.grid.slots; ++t)
      price_basis.kw[static_cast<size_t>(t)] =
          std::max(0.0, core.ideal.ideal_total.kw[static_cast<size_t>(t)] -
                            core.original_total.kw[static_cast<size_t>(t)]);
  }
  core.prices = derive_price_curve(price_basis, config.f_min_cents, config.f_max_cents,
                                   config.price_direction);

  for (const EvProfile* ev : scenario.all_evs())
    core.frequencies.push_back(estimate_frequency(*ev));
  return core;
}

namespace {

// Draws one trial's masks, redrawing any mask that cannot hold its EV's
// energy under the switching rule (up to kMaskResampleLimit attempts).
struct TrialMasks {
  std::vector<AvailabilityMask> masks;
  int resampled = 0;
  int floor_raised = 0;
};

TrialMasks sample_trial_masks(const ExperimentConfig& config, const CommunityScenario& scenario,
                              const PipelineCore& core, int trial) {
  TrialMasks out;
  const auto evs = scenario.all_evs();
  for (size_t i = 0; i < evs.size(); ++i) {
    const EvProfile& ev = *evs[i];
    AvailabilityMask mask;
    bool feasible = false;
    for (int attempt = 0; attempt < kMaskResampleLimit; ++attempt) {
      const std::uint64_t seed = derive_seed(
          config.seed, {seed_tag::kMask, static_cast<std::uint64_t>(trial),
                        static_cast<std::uint64_t>(ev.id), static_cast<std::uint64_t>(attempt)});
      mask = sample_availability(core.frequencies[i], config.tau, ev.daily_energy_kwh,
                                 config.p_max_kw, scenario.grid, seed);
      if (problem_is_feasible(make_problem(config, core, ev, mask))) {
        feasible = true;
        if (attempt > 0) out.resampled += attempt;
        break;
      }
    }
    if (!feasible)
      throw InfeasibleError("trial " + std::to_string(trial) + ": ev " + std::to_string(ev.id) +
                                " has no schedulable mask after " +
                                std::to_string(kMaskResampleLimit) + " redraws",
                            0.0);
    if (mask.tau_effective > mask.tau + 1e-12) out.floor_raised += 1;
    out.masks.push_back(std::move(mask));
  }
  return out;
}

TrialResult run_trial(const ExperimentConfig& config, const CommunityScenario& scenario,
                      const PipelineCore& core, int trial, double original_peak) {
  TrialResult tr;
  tr.trial = trial;
  TrialMasks tm = sample_trial_masks(config, scenario, core, trial);
  tr.masks = std::move(tm.masks);
  tr.resampled_masks = tm.resampled;
  tr.floor_raised_masks = tm.floor_raised;
  tr.community = schedule_community(
      scenario, core.prices, tr.masks,
      ScheduleParams{config.p_min_kw, config.p_max_kw, config.t_off_on_minutes},
      config.threads);

  // every emitted schedule must satisfy the independent auditor
  const auto evs = scenario.all_evs();
  for (size_t i = 0; i < tr.masks.size(); ++i) {
    const auto violations = audit_schedule(make_problem(config, core, *evs[i], tr.masks[i]),
                                           tr.community.schedules[i]);
    if (!violations.empty())
      throw std::logic_error("trial " + std::to_string(trial) + " ev " +
                             std::to_string(evs[i]->id) +
                             " failed the constraint audit: " + violations.front());
  }

  tr.optimized_metrics = compute_metrics(tr.community.combined_total, original_peak);
  tr.optimized_peak_kw = tr.optimized_metrics.peak_kw;
  tr.reduction_pct = tr.optimized_metrics.reduction_pct.value_or(0.0);
  return tr;
}

}  // namespace

std::vector<AvailabilityMask> sample_masks_for_trial(const ExperimentConfig& config,
                                                     const CommunityScenario& scenario,
                                                     const PipelineCore& core, int trial) {
  return sample_trial_masks(config, scenario, core, trial).masks;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of empty set");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

PipelineResult run_pipeline_on(const ExperimentConfig& config, CommunityScenario scenario) {
  config.validate();
  PipelineResult result;
  result.core = compute_core(config, scenario);
  result.original_peak_kw = compute_metrics(result.core.original_total).peak_kw;
  result.ideal_peak_kw = ideal_peak(result.core.ideal);

  result.scenario = std::move(scenario);
  std::vector<double> peaks, reductions;
  for (int trial = 0; trial < config.trials; ++trial) {
    TrialResult tr = run_trial(config, result.scenario, result.core, trial,
                               result.original_peak_kw);
    peaks.push_back(tr.optimized_peak_kw);
    reductions.push_back(tr.reduction_pct);
    result.trials.push_back(std::move(tr));
  }
  result.median_optimized_peak_kw = median(peaks);
  result.median_reduction_pct = median(reductions);
  return result;
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
  config.validate();
  SynthesisParams params;
  params.n_households = config.households;
  params.evs_per_household_mean = config.evs_per_household_mean;
  params.observed_days = config.observed_days;
  params.seed = config.seed;
  params.day_kind = config.day_kind;
  return run_pipeline_on(config, synthesize_community(params));
}

void write_pipeline_artifacts(const PipelineResult& result, const ExperimentConfig& config,
                              const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::create_directories(dir / "metrics", ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + out_dir);

  save_community_csv(result.scenario, (dir / "community.csv").string());

  const auto& core = result.core;
  {
    auto out = open_out(dir / "ideal_curve.csv");
    out << "slot,residential_kw,desired_ev_kw,ideal_total_kw\n";
    for (int t = 0; t < result.scenario.grid.slots; ++t)
      out << t << ',' << num(core.residential_total.kw[static_cast<size_t>(t)]) << ','
          << num(core.ideal.desired_ev.kw[static_cast<size_t>(t)]) << ','
          << num(core.ideal.ideal_total.kw[static_cast<size_t>(t)]) << '\n';
  }
  {
    json j;
    j["s1"] = core.ideal.s1;
    j["s2"] = core.ideal.s2;
    j["H"] = core.ideal.peak_slot;
    j["L"] = core.ideal.flat_level_kw;
    j["ideal_peak_kw"] = result.ideal_peak_kw;
    write_json_file(dir / "ideal_summary.json", j);
  }
  {
    auto out = open_out(dir / "prices.csv");
    out << "slot,price_cents_per_kwh\n";
    for (int t = 0; t < result.scenario.grid.slots; ++t)
      out << t << ',' << num(core.prices.cents_per_kwh[static_cast<size_t>(t)], "%.4f") << '\n';
  }
  {
    auto out = open_out(dir / "availability.csv");
    out << "trial,ev_id,slot\n";
    for (const auto& tr : result.trials)
      for (const auto& mask : tr.masks)
        for (int slot : mask.slots) out << tr.trial << ',' << mask.ev_id << ',' << slot << '\n';
  }
  {
    auto sched_out = open_out(dir / "schedules.csv");
    auto cost_out = open_out(dir / "costs.csv");
    sched_out << "trial,ev_id,slot,kw,status\n";
    cost_out << "trial,ev_id,energy_kwh,cost_cents,baseline_cost_cents,savings_pct\n";
    const auto evs = result.scenario.all_evs();
    const double dt = result.scenario.grid.slot_hours;
    for (const auto& tr : result.trials) {
      for (size_t i = 0; i < tr.masks.size(); ++i) {
        const auto& mask = tr.masks[i];
        const auto& cs = tr.community.schedules[i];
        for (int slot : mask.slots)
          sched_out << tr.trial << ',' << mask.ev_id << ',' << slot << ','
                    << num(cs.power_kw[static_cast<size_t>(slot)]) << ','
                    << (cs.status[static_cast<size_t>(slot)] ? 1 : 0) << '\n';
        const EvProfile& ev = *evs[i];
        double baseline = 0.0;
        for (int t = 0; t < result.scenario.grid.slots; ++t)
          baseline += ev.historical.front().kw[static_cast<size_t>(t)] * dt *
                      core.prices.cents_per_kwh[static_cast<size_t>(t)];
        const double savings =
            baseline > 0.0 ? 100.0 * (baseline - cs.cost_cents) / baseline : 0.0;
        cost_out << tr.trial << ',' << mask.ev_id << ',' << num(ev.daily_energy_kwh) << ','
                 << num(cs.cost_cents) << ',' << num(baseline) << ',' << num(savings) << '\n';
      }
    }
  }

  write_json_file(dir / "metrics" / "original.json",
                  metrics_to_json(compute_metrics(core.original_total)));
  write_json_file(dir / "metrics" / "ideal.json",
                  metrics_to_json(compute_metrics(core.ideal.ideal_total)));
  std::vector<DemandSeries> optimized_totals;
  for (const auto& tr : result.trials) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%03d.json", tr.trial);
    write_json_file(dir / "metrics" / name, metrics_to_json(tr.optimized_metrics));
    optimized_totals.push_back(tr.community.combined_total);
  }
  {
    const auto stats = trial_statistics(optimized_totals);
    auto out = open_out(dir / "boxplot.csv");
    out << "slot,min,q1,median,q3,max\n";
    for (size_t t = 0; t < stats.size(); ++t)
      out << t << ',' << num(stats[t].whisker_lo) << ',' << num(stats[t].q1) << ','
          << num(stats[t].median) << ',' << num(stats[t].q3) << ',' << num(stats[t].whisker_hi)
          << '\n';
  }
  {
    json j;
    j["schema_version"] = 1;
    j["config"] = json::parse(config_to_json_text(config));
    j["households"] = result.scenario.households.size();
    j["ev_count"] = result.scenario.ev_count();
    j["total_ev_energy_kwh"] = core.total_ev_energy_kwh;
    j["original_peak_kw"] = result.original_peak_kw;
    j["ideal_peak_kw"] = result.ideal_peak_kw;
    j["ideal"] = {{"s1", core.ideal.s1},
                  {"s2", core.ideal.s2},
                  {"H", core.ideal.peak_slot},
                  {"L", core.ideal.flat_level_kw}};
    json trials = json::array();
    for (const auto& tr : result.trials) {
      double delivered = 0.0;
      for (const auto& cs : tr.community.schedules)
        for (double v : cs.power_kw) delivered += v;
      delivered *= result.scenario.grid.slot_hours;
      trials.push_back({{"trial", tr.trial},
                        {"optimized_peak_kw", tr.optimized_peak_kw},
                        {"reduction_pct", tr.reduction_pct},
                        {"ev_energy_delivered_kwh", delivered},
                        {"resampled_masks", tr.resampled_masks},
                        {"floor_raised_masks", tr.floor_raised_masks}});
    }
    j["trials"] = std::move(trials);
    j["median_optimized_peak_kw"] = result.median_optimized_peak_kw;
    j["median_reduction_pct"] = result.median_reduction_pct;
    write_json_file(dir / "summary.json", j);
  }
}

std::vector<SizeSweepRow> run_size_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.size_fractions.empty())
    throw ParameterError("size sweep: at least one fraction required");
  SynthesisParams params;
  params.n_households = config.households;
  params.evs_per_household_mean = config.evs_per_household_mean;
  params.observed_days = config.observed_days;
  params.seed = config.seed;
  params.day_kind = config.day_kind;
  const CommunityScenario full = synthesize_community(params);

  std::vector<SizeSweepRow> rows;
  for (double fraction : config.size_fractions) {
    SizeSweepRow row;
    row.fraction = fraction;
    const size_t count = std::max<size_t>(
        1, static_cast<size_t>(std::floor(fraction * full.households.size() + 0.5)));
    const auto subset =
        seeded_subset(full.households.size(), count,
                      derive_seed(config.seed, {seed_tag::kSizeSubset,
                                                static_cast<std::uint64_t>(
                                                    std::llround(fraction * 1e9))}));
    CommunityScenario sub;
    sub.grid = full.grid;
    sub.day_kind = full.day_kind;
    sub.seed = full.seed;
    sub.observed_days = full.observed_days;
    for (size_t i : subset) sub.households.push_back(full.households[i]);
    row.households = static_cast<int>(sub.households.size());
    row.evs = sub.ev_count();
    row.degenerate = row.evs == 0;

    PipelineResult res = run_pipeline_on(config, std::move(sub));
    row.original_peak_kw = res.original_peak_kw;
    row.ideal_peak_kw = res.ideal_peak_kw;
    row.optimized_peak_kw = res.median_optimized_peak_kw;
    row.reduction_pct =
        100.0 * (res.original_peak_kw - res.median_optimized_peak_kw) / res.original_peak_kw;
    rows.push_back(row);
  }
  return rows;
}

void write_size_sweep_csv(const std::vector<SizeSweepRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "size,households,evs,original_peak_kw,ideal_peak_kw,optimized_peak_kw,"
         "reduction_pct,degenerate\n";
  for (const auto& r : rows)
    out << num(r.fraction) << ',' << r.households << ',' << r.evs << ','
        << num(r.original_peak_kw) << ',' << num(r.ideal_peak_kw) << ','
        << num(r.optimized_peak_kw) << ',' << num(r.reduction_pct) << ','
        << (r.degenerate ? 1 : 0) << '\n';
}

std::vector<ParticipationRow> run_participation_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.participation_fractions.empty())
    throw ParameterError("participation sweep: at least one fraction required");

  SynthesisParams params;
  params.n_households = config.households;
  params.evs_per_household_mean = config.evs_per_household_mean;
  params.observed_days = config.observed_days;
  params.seed = config.seed;
  params.day_kind = config.day_kind;
  const CommunityScenario scenario = synthesize_community(params);
  const PipelineCore core = compute_core(config, scenario);
  const double original_peak = compute_metrics(core.original_total).peak_kw;
  const auto evs = scenario.all_evs();
  const size_t m = evs.size();

  std::vector<ParticipationRow> rows;
  for (double fraction : config.participation_fractions) {
    ParticipationRow row;
    row.fraction = fraction;
    const size_t count = static_cast<size_t>(std::floor(fraction * static_cast<double>(m) + 0.5));
    row.participants = static_cast<int>(count);
    const auto chosen =
        seeded_subset(m, count,
                      derive_seed(config.seed, {seed_tag::kParticipants,
                                                static_cast<std::uint64_t>(
                                                    std::llround(fraction * 1e9))}));
    std::vector<char> participating(m, 0);
    for (size_t i : chosen) participating[i] = 1;

    // non-participants keep their day-0 historical charging
    DemandSeries nonparticipant_load = zero_series(scenario.grid);
    for (size_t i = 0; i < m; ++i) {
      if (participating[i]) continue;
      const auto& hist = evs[i]->historical.front();
      for (int t = 0; t < scenario.grid.slots; ++t)
        nonparticipant_load.kw[static_cast<size_t>(t)] += hist.kw[static_cast<size_t>(t)];
    }

    std::vector<double> peaks;
    for (int trial = 0; trial < config.trials; ++trial) {
      TrialMasks tm = sample_trial_masks(config, scenario, core, trial);
      std::vector<AvailabilityMask> active;
      for (size_t i = 0; i < m; ++i)
        if (participating[i]) active.push_back(tm.masks[i]);
      DemandSeries total = add_series(core.residential_total, nonparticipant_load);
      if (!active.empty()) {
        const auto solved = schedule_community(
            scenario, core.prices, active,
            ScheduleParams{config.p_min_kw, config.p_max_kw, config.t_off_on_minutes},
            config.threads);
        total = add_series(total, solved.ev_total);
      }
      peaks.push_back(compute_metrics(total).peak_kw);
    }
    row.optimized_peak_kw = median(peaks);
    row.reduction_pct = 100.0 * (original_peak - row.optimized_peak_kw) / original_peak;
    rows.push_back(row);
  }
  return rows;
}

void write_participation_csv(const std::vector<ParticipationRow>& rows,
                             const std::string& path) {
  auto out = open_out(path);
  out << "participation,participants,optimized_peak_kw,reduction_pct\n";
  for (const auto& r : rows)
    out << num(r.fraction) << ',' << r.participants << ',' << num(r.optimized_peak_kw) << ','
        << num(r.reduction_pct) << '\n';
}

std::vector<CostTableRow> run_cost_table(const ExperimentConfig& config, int k) {
  config.validate();
  SynthesisParams params;
  params.n_households = config.households;
  params.evs_per_household_mean = config.evs_per_household_mean;
  params.observed_days = config.observed_days;
  params.seed = config.seed;
  params.day_kind = config.day_kind;
  const CommunityScenario scenario = synthesize_community(params);
  const auto evs = scenario.all_evs();
  if (k < 0 || static_cast<size_t>(k) > evs.size())
    throw ParameterError("cost table: k must be <= the EV count");

  const PipelineCore core = compute_core(config, scenario);
  TrialMasks tm = sample_trial_masks(config, scenario, core, /*trial=*/0);
  const auto chosen = seeded_subset(evs.size(), static_cast<size_t>(k),
                                    derive_seed(config.seed, {seed_tag::kCostTable}));

  const double dt = scenario.grid.slot_hours;
  std::vector<CostTableRow> rows;
  for (size_t i : chosen) {
    const EvProfile& ev = *evs[i];
    SchedulingProblem prob = make_problem(config, core, ev, tm.masks[i]);
    const ChargeSchedule optimized = solve_schedule(prob);

    const auto& hist = ev.historical.front();
    CostTableRow row;
    row.ev_id = ev.id;
    row.energy_kwh = ev.daily_energy_kwh;
    row.optimized_cost_cents = optimized.cost_cents;
    for (int t = 0; t < scenario.grid.slots; ++t)
      row.baseline_cost_cents +=
          hist.kw[static_cast<size_t>(t)] * dt * core.prices.cents_per_kwh[static_cast<size_t>(t)];
    row.savings_pct = row.baseline_cost_cents > 0.0
                          ? 100.0 * (row.baseline_cost_cents - row.optimized_cost_cents) /
                                row.baseline_cost_cents
                          : 0.0;

    // the baseline "fits" when the historical day is itself a feasible
    // schedule for the same problem
    ChargeSchedule baseline;
    baseline.ev_id = ev.id;
    baseline.power_kw = hist.kw;
    baseline.status.assign(hist.kw.size(), 0);
    for (size_t t = 0; t < hist.kw.size(); ++t)
      baseline.status[t] = hist.kw[t] > 0.0 ? 1 : 0;
    baseline.cost_cents = row.baseline_cost_cents;
    row.baseline_fits_mask = audit_schedule(prob, baseline).empty();
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(),
            [](const CostTableRow& a, const CostTableRow& b) { return a.ev_id < b.ev_id; });
  return rows;
}

void write_cost_table_csv(const std::vector<CostTableRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "ev_id,energy_kwh,baseline_cost_cents,optimized_cost_cents,savings_pct,"
         "baseline_fits_mask\n";
  for (const auto& r : rows)
    out << r.ev_id << ',' << num(r.energy_kwh) << ',' << num(r.baseline_cost_cents) << ','
        << num(r.optimized_cost_cents) << ',' << num(r.savings_pct) << ','
        << (r.baseline_fits_mask ? 1 : 0) << '\n';
}

}  // namespace evsched
