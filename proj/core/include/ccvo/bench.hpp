#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccvo/sim.hpp"

namespace ccvo {

/// Aggregate of one scenario/planner/k cell. Means cover successful episodes only.
struct BatchReport {
  struct Row {
    std::uint64_t seed = 0;
    Outcome outcome = Outcome::kTimeout;
    double length_m = 0.0;
    double time_s = 0.0;
    bool operator==(const Row&) const = default;
  };

  std::string scenario;
  PlannerKind planner = PlannerKind::kOfvo;
  double k = 1.0;
  int runs = 0;
  double success_rate = 0.0;
  double mean_trajectory_length = 0.0;  ///< NaN when no run succeeded
  double mean_navigation_time = 0.0;    ///< NaN when no run succeeded
  std::vector<Row> rows;                ///< sorted by seed
  int shadow_excess_steps = 0;          ///< only filled when shadowing was requested

  /// Recomputes the aggregate fields from `rows`.
  void aggregate();
};

struct BatchOptions {
  int workers = 0;  ///< 0 = hardware concurrency
  bool shadow_baseline = false;
};

BatchReport run_batch(const std::string& scenario, PlannerKind planner,
                      const ExperimentConfig& config, int n_runs, std::uint64_t base_seed,
                      const BatchOptions& options = {});

/// One report per k; every k reuses the seeds base_seed..base_seed+n_runs-1.
std::vector<BatchReport> sweep_k(const std::string& scenario, const std::vector<double>& ks,
                                 const ExperimentConfig& config, int n_runs,
                                 std::uint64_t base_seed, const BatchOptions& options = {},
                                 PlannerKind planner = PlannerKind::kOfvo);

// ---------------------------------------------------------------------------
// Monte-Carlo verification of the moment formulas and the Cantelli bound.

struct VerificationCase {
  std::string label;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string test;
  long samples = 0;
  std::vector<VerificationCase> cases;
  bool pass = false;

  int failures() const;
};

/// Sampled |d_rel|^2 - r_sum^2 moments.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
  double mean_std_error = 0.0;
  double variance_std_error = 0.0;
};

/// Draws n samples of |N(mu_rel, s^2 I)|^2 - r_sum^2.
SampleMoments sample_f_moments(const RelativeDistribution& rel, double r_sum, long n,
                               std::mt19937_64& rng);

/// Empirical P(f <= 0).
double sample_violation_probability(const RelativeDistribution& rel, double r_sum, long n,
                                    std::mt19937_64& rng);

/// Mean and standard deviation of f against the analytic moments for random configurations
/// (1% relative), the s^2 = 0 limit, and monotonicity of the variance in s^2.
VerificationReport verify_moments(int n_configs, long n_samples, std::uint64_t seed);

/// For each k, configurations with mu_f - k sigma_f > 0 (a share of them within 0.01 sigma_f
/// of the boundary) must satisfy P(f <= 0) <= 1/(1+k^2) + 3 MC standard errors.
VerificationReport verify_cantelli(const std::vector<double>& ks, int n_configs, long n_samples,
                                 std::uint64_t seed);

// ---------------------------------------------------------------------------
// Files

inline constexpr const char* kRunsCsvHeader = "scenario,planner,k,seed,outcome,length_m,time_s";
inline constexpr const char* kSummaryCsvHeader =
    "scenario,planner,k,runs,success_rate,mean_length_m,mean_time_s";

void write_runs_csv(std::ostream& out, const std::vector<BatchReport>& reports);
void write_summary_csv(std::ostream& out, const std::vector<BatchReport>& reports);
/// Parses a runs CSV back into reports (grouped by scenario, planner, k; aggregates recomputed).
std::vector<BatchReport> read_runs_csv(std::istream& in);

/// Writes <dir>/runs.csv and <dir>/summary.csv; returns the paths written.
std::vector<std::filesystem::path> write_batch_outputs(const std::filesystem::path& dir,
                                                       const std::vector<BatchReport>& reports);

/// One JSON object per line: time, x, y, heading, chosen_vx, chosen_vy, feasible_count.
void write_trace_jsonl(std::ostream& out, const EpisodeResult& episode);

/// Loads an experiment config from a JSON file; missing keys keep their defaults.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string dump_experiment_config(const ExperimentConfig& config);

/// Value of CCVO_OUT_DIR, if set.
std::optional<std::filesystem::path> default_output_dir();

}  // namespace ccvo
