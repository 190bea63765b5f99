// Scenario CLI: generate -> ideal -> price -> sample -> schedule -> metrics
// stages, the full pipeline, and the sweep/cost-table experiments. All
// outputs are plot-ready CSV/JSON under --out; everything is a pure
// function of the configuration and seed.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evsched/community.hpp"
#include "evsched/csv_io.hpp"
#include "evsched/errors.hpp"
#include "evsched/experiment.hpp"

namespace fs = std::filesystem;
using namespace evsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct CliOptions {
  ExperimentConfig config;
  std::string out_dir = "out";
  std::string config_path;
  std::string community_path;  // optional pre-generated community CSV
  std::string day_kind_str;
  std::string price_direction_str;
  std::string price_input_str;
  int cost_table_k = 5;
};

SynthesisParams synth_params(const ExperimentConfig& c) {
  SynthesisParams p;
  p.n_households = c.households;
  p.evs_per_household_mean = c.evs_per_household_mean;
  p.observed_days = c.observed_days;
  p.seed = c.seed;
  p.day_kind = c.day_kind;
  return p;
}

CommunityScenario obtain_scenario(const CliOptions& opt) {
  if (!opt.community_path.empty()) return load_community_csv(opt.community_path);
  return synthesize_community(synth_params(opt.config));
}

void ensure_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead EV charging optimization pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOptions opt;

  // global knobs, shared by every subcommand
  app.add_option("--seed", opt.config.seed, "Master seed for all randomness");
  app.add_option("--out", opt.out_dir, "Output directory");
  app.add_option("--config", opt.config_path, "JSON config file (flags override it)");
  app.add_option("--households", opt.config.households, "Number of households");
  app.add_option("--evs-mean", opt.config.evs_per_household_mean, "Mean EVs per household");
  app.add_option("--days", opt.config.observed_days, "Observed historical days");
  app.add_option("--day-kind", opt.day_kind_str, "weekday or weekend");
  app.add_option("--tau", opt.config.tau, "Comfort tolerance in (0, 1]");
  app.add_option("--f-min", opt.config.f_min_cents, "Price lower bound, cents/kWh");
  app.add_option("--f-max", opt.config.f_max_cents, "Price upper bound, cents/kWh");
  app.add_option("--price-direction", opt.price_direction_str, "intended or literal");
  app.add_option("--price-input", opt.price_input_str, "desired-ev or ideal-minus-original");
  app.add_option("--p-max", opt.config.p_max_kw, "Maximum charging power, kW");
  app.add_option("--p-min", opt.config.p_min_kw, "Minimum nonzero charging power, kW");
  app.add_option("--t-off-on-min", opt.config.t_off_on_minutes, "Minimum off-on interval, minutes");
  app.add_option("--trials", opt.config.trials, "Availability-sampling trials");
  app.add_option("--threads", opt.config.threads, "Worker threads (0 = hardware)");
  app.add_option("--community", opt.community_path, "Load this community CSV instead of generating");

  auto* cmd_generate = app.add_subcommand("generate", "Synthesize a community and save its CSV");
  auto* cmd_ideal = app.add_subcommand("ideal", "Compute the ideal demand curve");
  auto* cmd_price = app.add_subcommand("price", "Derive the day-ahead price curve");
  auto* cmd_sample = app.add_subcommand("sample", "Sample availability masks per trial");
  auto* cmd_schedule = app.add_subcommand("schedule", "Solve per-EV schedules for every trial");
  auto* cmd_metrics = app.add_subcommand("metrics", "Emit metrics and boxplot statistics");
  auto* cmd_pipeline = app.add_subcommand("pipeline", "Run the full optimization pipeline");
  auto* cmd_sweep_size = app.add_subcommand("sweep-size", "Community-size scaling sweep");
  auto* cmd_sweep_part =
      app.add_subcommand("sweep-participation", "Participation-percentage sweep");
  auto* cmd_cost = app.add_subcommand("cost-table", "Per-EV baseline vs optimized cost table");
  cmd_cost->add_option("--k", opt.cost_table_k, "Number of EVs to sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    // --config loads first, then explicit flags override its values
    if (!opt.config_path.empty()) {
      ExperimentConfig from_file = config_from_json_file(opt.config_path);
      ExperimentConfig defaults;
      auto keep = [&](auto&& flag, auto member) {
        if (app.count(flag) == 0) opt.config.*member = from_file.*member;
      };
      keep("--seed", &ExperimentConfig::seed);
      keep("--households", &ExperimentConfig::households);
      keep("--evs-mean", &ExperimentConfig::evs_per_household_mean);
      keep("--days", &ExperimentConfig::observed_days);
      keep("--tau", &ExperimentConfig::tau);
      keep("--f-min", &ExperimentConfig::f_min_cents);
      keep("--f-max", &ExperimentConfig::f_max_cents);
      keep("--p-max", &ExperimentConfig::p_max_kw);
      keep("--p-min", &ExperimentConfig::p_min_kw);
      keep("--t-off-on-min", &ExperimentConfig::t_off_on_minutes);
      keep("--trials", &ExperimentConfig::trials);
      keep("--threads", &ExperimentConfig::threads);
      if (opt.day_kind_str.empty()) opt.config.day_kind = from_file.day_kind;
      if (opt.price_direction_str.empty()) opt.config.price_direction = from_file.price_direction;
      if (opt.price_input_str.empty()) opt.config.price_input = from_file.price_input;
      opt.config.size_fractions = from_file.size_fractions;
      opt.config.participation_fractions = from_file.participation_fractions;
    }
    if (!opt.day_kind_str.empty()) opt.config.day_kind = day_kind_from_string(opt.day_kind_str);
    if (!opt.price_direction_str.empty())
      opt.config.price_direction = price_direction_from_string(opt.price_direction_str);
    if (!opt.price_input_str.empty())
      opt.config.price_input = price_input_from_string(opt.price_input_str);
    opt.config.validate();

    const ExperimentConfig& cfg = opt.config;
    ensure_out(opt.out_dir);
    const fs::path dir(opt.out_dir);

    if (*cmd_generate) {
      CommunityScenario sc = synthesize_community(synth_params(cfg));
      save_community_csv(sc, (dir / "community.csv").string());
      std::cout << "wrote " << (dir / "community.csv").string() << " (" << sc.households.size()
                << " households, " << sc.ev_count() << " EVs)\n";
    } else if (*cmd_ideal || *cmd_price || *cmd_sample) {
      CommunityScenario sc = obtain_scenario(opt);
      PipelineCore core = compute_core(cfg, sc);
      if (*cmd_ideal) {
        std::ofstream out(dir / "ideal_curve.csv", std::ios::binary);
        out << "slot,residential_kw,desired_ev_kw,ideal_total_kw\n";
        char buf[160];
        for (int t = 0; t < sc.grid.slots; ++t) {
          std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", t,
                        core.residential_total.kw[static_cast<size_t>(t)],
                        core.ideal.desired_ev.kw[static_cast<size_t>(t)],
                        core.ideal.ideal_total.kw[static_cast<size_t>(t)]);
          out << buf;
        }
        nlohmann::json js;
        js["H"] = core.ideal.peak_slot;
        js["L"] = core.ideal.flat_level_kw;
        js["ideal_peak_kw"] = ideal_peak(core.ideal);
        js["s1"] = core.ideal.s1;
        js["s2"] = core.ideal.s2;
        std::ofstream js_out(dir / "ideal_summary.json", std::ios::binary);
        js_out << js.dump(2) << '\n';
        std::cout << "wrote ideal_curve.csv (s1=" << core.ideal.s1 << ", s2=" << core.ideal.s2
                  << ", L=" << core.ideal.flat_level_kw << " kW)\n";
      } else if (*cmd_price) {
        std::ofstream out(dir / "prices.csv", std::ios::binary);
        out << "slot,price_cents_per_kwh\n";
        char buf[64];
        for (int t = 0; t < sc.grid.slots; ++t) {
          std::snprintf(buf, sizeof(buf), "%d,%.4f\n", t,
                        core.prices.cents_per_kwh[static_cast<size_t>(t)]);
          out << buf;
        }
        std::cout << "wrote prices.csv\n";
      } else {
        std::ofstream out(dir / "availability.csv", std::ios::binary);
        out << "trial,ev_id,slot\n";
        for (int trial = 0; trial < cfg.trials; ++trial) {
          const auto masks = sample_masks_for_trial(cfg, sc, core, trial);
          for (const auto& mask : masks)
            for (int slot : mask.slots)
              out << trial << ',' << mask.ev_id << ',' << slot << '\n';
        }
        std::cout << "wrote availability.csv\n";
      }
    } else if (*cmd_schedule || *cmd_metrics || *cmd_pipeline) {
      PipelineResult result;
      if (!opt.community_path.empty())
        result = run_pipeline_on(cfg, load_community_csv(opt.community_path));
      else
        result = run_pipeline(cfg);
      write_pipeline_artifacts(result, cfg, opt.out_dir);
      std::cout << "original peak " << result.original_peak_kw << " kW, ideal "
                << result.ideal_peak_kw << " kW, median optimized "
                << result.median_optimized_peak_kw << " kW (reduction "
                << result.median_reduction_pct << "%)\n";
    } else if (*cmd_sweep_size) {
      const auto rows = run_size_sweep(cfg);
      write_size_sweep_csv(rows, (dir / "sweep_size.csv").string());
      for (const auto& r : rows)
        std::cout << "size " << r.fraction << ": reduction " << r.reduction_pct << "%"
                  << (r.degenerate ? " (degenerate)" : "") << "\n";
    } else if (*cmd_sweep_part) {
      const auto rows = run_participation_sweep(cfg);
      write_participation_csv(rows, (dir / "sweep_participation.csv").string());
      for (const auto& r : rows)
        std::cout << "participation " << r.fraction << ": reduction " << r.reduction_pct
                  << "%\n";
    } else if (*cmd_cost) {
      const auto rows = run_cost_table(cfg, opt.cost_table_k);
      write_cost_table_csv(rows, (dir / "cost_table.csv").string());
      for (const auto& r : rows)
        std::cout << "ev " << r.ev_id << ": " << r.energy_kwh << " kWh, baseline "
                  << r.baseline_cost_cents << " c, optimized " << r.optimized_cost_cents
                  << " c (" << r.savings_pct << "% saved)\n";
    }
    return kExitOk;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << " (max deliverable "
              << e.max_deliverable_kwh() << " kWh)\n";
    return kExitInfeasible;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
