#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evsched/audit.hpp"
#include "evsched/behavior.hpp"
#include "evsched/community.hpp"
#include "evsched/ideal_curve.hpp"
#include "evsched/metrics.hpp"
#include "evsched/pricing.hpp"
#include "evsched/scheduler.hpp"

namespace evsched {

// Which series feeds the price normalization: the desired EV allocation,
// or the (clamped) ideal-minus-original difference. The first is the
// default; the second is exposed for experimentation only.
enum class PriceInput { desired_ev, ideal_minus_original };

PriceInput price_input_from_string(const std::string& s);
std::string to_string(PriceInput input);

struct ExperimentConfig {
  // scenario
  std::uint64_t seed = 5;
  int households = 200;
  double evs_per_household_mean = 1.28;
  int observed_days = 365;
  DayKind day_kind = DayKind::weekday;
  // behavior
  double tau = 0.5;
  // pricing
  double f_min_cents = 15.0;
  double f_max_cents = 20.0;
  PriceDirection price_direction = PriceDirection::intended;
  PriceInput price_input = PriceInput::desired_ev;
  // scheduler
  double p_max_kw = 1.92;
  double p_min_kw = 0.96;
  int t_off_on_minutes = 30;
  // experiment
  int trials = 20;
  std::vector<double> size_fractions = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  std::vector<double> participation_fractions = {1.0, 0.9, 0.8, 0.7, 0.6,
                                                 0.5, 0.4, 0.3, 0.2, 0.1};
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// JSON mirror of ExperimentConfig for --config files.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& config);

// Stages up to the day-ahead price curve; shared by every experiment.
struct PipelineCore {
  DemandSeries residential_total;
  DemandSeries ev_baseline_total;  // historical charging, day 0
  DemandSeries original_total;     // residential + historical EV
  double total_ev_energy_kwh = 0.0;
  IdealCurveResult ideal;
  PriceCurve prices;
  std::vector<ChargingFrequency> frequencies;  // all_evs() order
};

PipelineCore compute_core(const ExperimentConfig& config, const CommunityScenario& scenario);

// One trial's availability masks in all_evs() order. Masks that cannot
// hold their EV's energy under the switching rule are redrawn with
// derived seeds (up to 10 times) before an InfeasibleError is raised.
std::vector<AvailabilityMask> sample_masks_for_trial(const ExperimentConfig& config,
                                                     const CommunityScenario& scenario,
                                                     const PipelineCore& core, int trial);

struct TrialResult {
  int trial = 0;
  std::vector<AvailabilityMask> masks;  // all_evs() order
  CommunityScheduleResult community;
  MetricsReport optimized_metrics;
  double optimized_peak_kw = 0.0;
  double reduction_pct = 0.0;  // vs. the original combined peak
  int resampled_masks = 0;     // infeasible-mask redraws across EVs
  int floor_raised_masks = 0;  // masks whose tau_effective exceeds tau
};

struct PipelineResult {
  CommunityScenario scenario;
  PipelineCore core;
  double original_peak_kw = 0.0;
  double ideal_peak_kw = 0.0;
  std::vector<TrialResult> trials;
  double median_optimized_peak_kw = 0.0;
  double median_reduction_pct = 0.0;
};

PipelineResult run_pipeline(const ExperimentConfig& config);
PipelineResult run_pipeline_on(const ExperimentConfig& config, CommunityScenario scenario);

// Writes every module artifact (community, ideal curve, prices,
// availability, schedules, costs, metrics, boxplot) plus summary.json
// under out_dir. Output bytes are a pure function of config and seed.
void write_pipeline_artifacts(const PipelineResult& result, const ExperimentConfig& config,
                              const std::string& out_dir);

struct SizeSweepRow {
  double fraction = 1.0;
  int households = 0;
  int evs = 0;
  double original_peak_kw = 0.0;
  double ideal_peak_kw = 0.0;
  double optimized_peak_kw = 0.0;  // median over trials
  double reduction_pct = 0.0;
  bool degenerate = false;  // no EVs in the sampled subset
};

std::vector<SizeSweepRow> run_size_sweep(const ExperimentConfig& config);
void write_size_sweep_csv(const std::vector<SizeSweepRow>& rows, const std::string& path);

struct ParticipationRow {
  double fraction = 1.0;
  int participants = 0;
  double optimized_peak_kw = 0.0;  // median over trials
  double reduction_pct = 0.0;
};

std::vector<ParticipationRow> run_participation_sweep(const ExperimentConfig& config);
void write_participation_csv(const std::vector<ParticipationRow>& rows, const std::string& path);

struct CostTableRow {
  int ev_id = 0;
  double energy_kwh = 0.0;
  double baseline_cost_cents = 0.0;
  double optimized_cost_cents = 0.0;
  double savings_pct = 0.0;
  bool baseline_fits_mask = false;
};

std::vector<CostTableRow> run_cost_table(const ExperimentConfig& config, int k);
void write_cost_table_csv(const std::vector<CostTableRow>& rows, const std::string& path);

double median(std::vector<double> values);

}  // namespace evsched
