#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "ccvo/bench.hpp"

namespace ccvo::cli {

namespace {

struct PlannerOverrides {
  std::optional<double> k, horizon, collision_threshold, fov_deg, ped_speed, partial_horizon,
      preferred_speed, robot_radius, baseline_sigma;
  std::optional<int> n_tau, grid_speeds, grid_headings;
  bool no_fov = false;

  void attach(CLI::App* app, bool with_k) {
    if (with_k) app->add_option("--k", k, "confidence parameter k > 0");
    app->add_option("--horizon", horizon, "VO horizon T (s)");
    app->add_option("--n-tau", n_tau, "time samples over the horizon");
    app->add_option("--collision-threshold", collision_threshold, "C for lidar-only pedestrians (m)");
    app->add_option("--fov-deg", fov_deg, "camera FOV used by the heading constraint (deg)");
    app->add_option("--ped-speed", ped_speed, "assumed speed of unseen pedestrians (m/s)");
    app->add_option("--partial-horizon", partial_horizon, "look-ahead for lidar-only pedestrians (s)");
    app->add_option("--preferred-speed", preferred_speed, "cruise speed (m/s)");
    app->add_option("--robot-radius", robot_radius, "robot radius (m)");
    app->add_option("--baseline-sigma", baseline_sigma, "fixed sigma of the baseline planner");
    app->add_option("--grid-speeds", grid_speeds, "speed samples");
    app->add_option("--grid-headings", grid_headings, "heading samples");
    app->add_flag("--no-fov", no_fov, "disable the camera-FOV heading constraint");
  }

  void apply(PlannerConfig& p) const {
    if (k) p.k = *k;
    if (horizon) p.horizon = *horizon;
    if (n_tau) p.n_tau = *n_tau;
    if (collision_threshold) p.collision_threshold = *collision_threshold;
    if (fov_deg) p.camera_fov = deg2rad(*fov_deg);
    if (ped_speed) p.assumed_ped_speed = *ped_speed;
    if (partial_horizon) p.partial_horizon = *partial_horizon;
    if (preferred_speed) p.preferred_speed = *preferred_speed;
    if (robot_radius) p.robot_radius = *robot_radius;
    if (baseline_sigma) p.baseline_sigma = *baseline_sigma;
    if (grid_speeds) p.grid_speeds = *grid_speeds;
    if (grid_headings) p.grid_headings = *grid_headings;
    if (no_fov) p.enforce_fov = false;
  }
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("invalid number in list: '" + item + "'");
    }
    if (used != item.size()) throw ConfigError("invalid number in list: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void print_summary(std::ostream& out, const BatchReport& r) {
  out << std::left << std::setw(8) << r.scenario << ' ' << std::setw(14) << to_string(r.planner)
      << " k=" << std::setw(5) << r.k << " runs=" << r.runs << " success=" << std::fixed
      << std::setprecision(3) << r.success_rate << " length=" << r.mean_trajectory_length
      << "m time=" << r.mean_navigation_time << 's' << std::defaultfloat << '\n';
}

void print_verification(std::ostream& out, const VerificationReport& v, bool verbose) {
  out << v.test << ": " << v.cases.size() << " cases, " << v.failures() << " failures, samples="
      << v.samples << " -> " << (v.pass ? "PASS" : "FAIL") << '\n';
  for (const auto& c : v.cases) {
    if (!verbose && c.pass) continue;
    out << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.label << " analytic=" << c.analytic
        << " empirical=" << c.empirical << " tol=" << c.tolerance << '\n';
  }
}

std::filesystem::path resolve_out(const std::string& flag, const char* fallback) {
  if (!flag.empty()) return flag;
  if (auto env = default_output_dir()) return *env;
  return fallback;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chance-constrained velocity-obstacle navigation: simulator and benchmarks", "ccvo"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "experiment config (JSON)")->check(CLI::ExistingFile);

  // run
  auto* run = app.add_subcommand("run", "run one episode and write its trajectory trace");
  std::string run_scenario = "empty", run_planner = "ofvo", trace_path;
  std::uint64_t run_seed = 0;
  PlannerOverrides run_over;
  run->add_option("--scenario", run_scenario, "scenario name")->required();
  run->add_option("--planner", run_planner, "ofvo | prvo_baseline");
  run->add_option("--seed", run_seed, "episode seed");
  run->add_option("--trace", trace_path, "JSON-lines trace output path");
  run_over.attach(run, true);

  // batch
  auto* batch = app.add_subcommand("batch", "run seeded episodes and write CSV results");
  std::string batch_scenario, batch_planner = "ofvo", batch_out;
  int batch_runs = 200, workers = 0;
  std::uint64_t batch_seed = 0;
  PlannerOverrides batch_over;
  batch->add_option("--scenario", batch_scenario, "scenario name")->required();
  batch->add_option("--planner", batch_planner, "ofvo | prvo_baseline");
  batch->add_option("--runs", batch_runs, "number of episodes")->check(CLI::PositiveNumber);
  batch->add_option("--seed", batch_seed, "first seed");
  batch->add_option("--out", batch_out, "output directory (default $CCVO_OUT_DIR or results/)");
  batch->add_option("--workers", workers, "worker threads (0 = all cores)");
  batch_over.attach(batch, true);

  // sweep-k
  auto* sweep = app.add_subcommand("sweep-k", "success rate and time across k values");
  std::string sweep_scenario, sweep_ks = "0.1,0.7,1,2", sweep_out, sweep_planner = "ofvo";
  int sweep_runs = 200;
  std::uint64_t sweep_seed = 0;
  PlannerOverrides sweep_over;
  sweep->add_option("--scenario", sweep_scenario, "scenario name")->required();
  sweep->add_option("--ks", sweep_ks, "comma-separated k values");
  sweep->add_option("--planner", sweep_planner, "ofvo | prvo_baseline");
  sweep->add_option("--runs", sweep_runs, "episodes per k")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "first seed (shared by every k)");
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--workers", workers, "worker threads (0 = all cores)");
  sweep_over.attach(sweep, false);

  // verify
  auto* verify = app.add_subcommand("verify", "Monte-Carlo check of the moment formulas / Cantelli bound");
  std::string verify_test, verify_ks = "0.1,0.7,1,2";
  long verify_samples = 100000;
  int verify_configs = 50;
  std::uint64_t verify_seed = 1;
  bool verbose = false;
  verify->add_option("--test", verify_test, "moments | cantelli")
      ->required()
      ->check(CLI::IsMember({"moments", "cantelli"}));
  verify->add_option("--k", verify_ks, "comma-separated k values (cantelli)");
  verify->add_option("--samples", verify_samples, "draws per configuration")->check(CLI::PositiveNumber);
  verify->add_option("--configs", verify_configs, "random configurations")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "generator seed");
  verify->add_flag("--verbose", verbose, "print every case");

  // scenarios list
  auto* scenarios = app.add_subcommand("scenarios", "scenario catalogue");
  auto* scenarios_list = scenarios->add_subcommand("list", "print scenario names");
  scenarios->require_subcommand(1);

  // config dump
  auto* config_cmd = app.add_subcommand("config", "print the effective configuration as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }

  try {
    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);

    if (*run) {
      run_over.apply(config.planner);
      config.planner.validate();
      const auto kind = planner_kind_from_string(run_planner);
      const EpisodeResult ep = run_seeded_episode(run_scenario, kind, config, run_seed);
      if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        if (!f) throw std::runtime_error("cannot open " + trace_path + " for writing");
        write_trace_jsonl(f, ep);
      }
      out << "outcome=" << to_string(ep.outcome) << " length_m=" << ep.trajectory_length
          << " time_s=" << ep.navigation_time << " steps=" << ep.trajectory.size() - 1 << '\n';
      return kExitOk;
    }
    if (*batch) {
      batch_over.apply(config.planner);
      config.planner.validate();
      const auto kind = planner_kind_from_string(batch_planner);
      const auto report =
          run_batch(batch_scenario, kind, config, batch_runs, batch_seed, {workers, false});
      for (const auto& p : write_batch_outputs(resolve_out(batch_out, "results"), {report})) {
        out << "wrote " << p.string() << '\n';
      }
      print_summary(out, report);
      return kExitOk;
    }
    if (*sweep) {
      sweep_over.apply(config.planner);
      config.planner.validate();
      const auto kind = planner_kind_from_string(sweep_planner);
      const auto reports = sweep_k(sweep_scenario, parse_list(sweep_ks), config, sweep_runs,
                                   sweep_seed, {workers, false}, kind);
      for (const auto& p : write_batch_outputs(resolve_out(sweep_out, "results"), reports)) {
        out << "wrote " << p.string() << '\n';
      }
      for (const auto& r : reports) print_summary(out, r);
      return kExitOk;
    }
    if (*verify) {
      const VerificationReport report =
          verify_test == "moments"
              ? verify_moments(verify_configs, verify_samples, verify_seed)
              : verify_cantelli(parse_list(verify_ks), verify_configs, verify_samples, verify_seed);
      print_verification(out, report, verbose);
      return report.pass ? kExitOk : kExitFailed;
    }
    if (*scenarios_list) {
      for (const auto& name : scenario_names()) out << name << '\n';
      return kExitOk;
    }
    if (*config_cmd) {
      out << dump_experiment_config(config) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitConfig;
}

}  // namespace ccvo::cli
