#include "ccvo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace ccvo {

// ---------------------------------------------------------------------------
// Batches

void BatchReport::aggregate() {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.seed < b.seed; });
  runs = static_cast<int>(rows.size());
  int successes = 0;
  double length = 0.0, time = 0.0;
  for (const Row& r : rows) {
    if (r.outcome != Outcome::kSuccess) continue;
    ++successes;
    length += r.length_m;
    time += r.time_s;
  }
  success_rate = runs > 0 ? static_cast<double>(successes) / runs : 0.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  mean_trajectory_length = successes > 0 ? length / successes : nan;
  mean_navigation_time = successes > 0 ? time / successes : nan;
}

namespace {

template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace

BatchReport run_batch(const std::string& scenario, PlannerKind planner,
                      const ExperimentConfig& config, int n_runs, std::uint64_t base_seed,
                      const BatchOptions& options) {
  if (n_runs < 1) throw InvalidInput("run_batch: n_runs must be >= 1");
  // Fail fast on a bad scenario name before spawning workers.
  make_scenario(scenario, base_seed, config.scenario);

  BatchReport report;
  report.scenario = scenario;
  report.planner = planner;
  report.k = config.planner.k;
  report.rows.resize(static_cast<std::size_t>(n_runs));
  std::vector<int> excess(static_cast<std::size_t>(n_runs), 0);

  EpisodeOptions episode_options;
  episode_options.shadow_baseline = options.shadow_baseline;
  parallel_for(n_runs, options.workers, [&](int i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const EpisodeResult ep = run_seeded_episode(scenario, planner, config, seed, episode_options);
    report.rows[static_cast<std::size_t>(i)] = {seed, ep.outcome, ep.trajectory_length,
                                                ep.navigation_time};
    excess[static_cast<std::size_t>(i)] = ep.shadow_excess_steps;
  });
  for (int e : excess) report.shadow_excess_steps += e;
  report.aggregate();
  return report;
}

std::vector<BatchReport> sweep_k(const std::string& scenario, const std::vector<double>& ks,
                                 const ExperimentConfig& config, int n_runs,
                                 std::uint64_t base_seed, const BatchOptions& options,
                                 PlannerKind planner) {
  if (ks.empty()) throw InvalidInput("sweep_k: no k values");
  std::vector<BatchReport> reports;
  for (double k : ks) {
    if (!(k > 0.0)) throw InvalidInput("sweep_k: k values must be positive");
    ExperimentConfig c = config;
    c.planner.k = k;
    reports.push_back(run_batch(scenario, planner, c, n_runs, base_seed, options));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Verification

int VerificationReport::failures() const {
  return static_cast<int>(
      std::count_if(cases.begin(), cases.end(), [](const auto& c) { return !c.pass; }));
}

SampleMoments sample_f_moments(const RelativeDistribution& rel, double r_sum, long n,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double s = std::sqrt(rel.sigma_rel_sq);
  const double r2 = r_sum * r_sum;
  // Welford for mean/variance plus the fourth central moment for the variance's standard error.
  double mean = 0.0, m2 = 0.0;
  std::vector<double> values(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double x = rel.mu_rel.x + s * unit(rng);
    const double y = rel.mu_rel.y + s * unit(rng);
    const double f = x * x + y * y - r2;
    values[static_cast<std::size_t>(i)] = f;
    const double delta = f - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (f - mean);
  }
  SampleMoments out;
  out.mean = mean;
  out.variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  double m4 = 0.0;
  for (double f : values) {
    const double d = f - mean;
    m4 += d * d * d * d;
  }
  m4 /= static_cast<double>(n);
  out.mean_std_error = std::sqrt(out.variance / static_cast<double>(n));
  out.variance_std_error =
      std::sqrt(std::max(0.0, m4 - out.variance * out.variance) / static_cast<double>(n));
  return out;
}

double sample_violation_probability(const RelativeDistribution& rel, double r_sum, long n,
                                    std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double s = std::sqrt(rel.sigma_rel_sq);
  const double r2 = r_sum * r_sum;
  long violations = 0;
  for (long i = 0; i < n; ++i) {
    const double x = rel.mu_rel.x + s * unit(rng);
    const double y = rel.mu_rel.y + s * unit(rng);
    if (x * x + y * y - r2 <= 0.0) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(n);
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string describe(const RelativeDistribution& rel, double r_sum) {
  std::ostringstream os;
  os << "mu_rel=(" << rel.mu_rel.x << "," << rel.mu_rel.y << ") s2=" << rel.sigma_rel_sq
     << " r_sum=" << r_sum;
  return os.str();
}

VerificationCase relative_case(std::string label, double analytic, double empirical,
                               double std_error) {
  VerificationCase c{std::move(label), analytic, empirical, std_error, 0.0, false};
  c.tolerance = 0.01 * std::abs(analytic);
  c.pass = std::abs(empirical - analytic) <= c.tolerance;
  return c;
}

}  // namespace

VerificationReport verify_moments(int n_configs, long n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw InvalidInput("verify_moments: n_samples must be positive");
  VerificationReport report{"moments", n_samples, {}, false};
  std::mt19937_64 rng(seed);

  for (int i = 0; i < n_configs; ++i) {
    const RelativeDistribution rel{{uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0)},
                                   uniform(rng, 1e-3, 1.0)};
    const double r_sum = uniform(rng, 0.3, 1.0);
    const ChanceStats analytic = f_stats(rel, r_sum);
    const SampleMoments emp = sample_f_moments(rel, r_sum, n_samples, rng);
    const std::string tag = describe(rel, r_sum);
    // The mean is compared as E|d_rel|^2 so the shift by r_sum^2 cannot cancel it to ~0.
    const double shift = r_sum * r_sum;
    report.cases.push_back(
        relative_case("mean " + tag, analytic.mu_f + shift, emp.mean + shift, emp.mean_std_error));
    const double emp_sd = std::sqrt(emp.variance);
    const double sd_error = emp_sd > 0.0 ? emp.variance_std_error / (2.0 * emp_sd) : 0.0;
    report.cases.push_back(relative_case("sigma " + tag, analytic.sigma_f, emp_sd, sd_error));

    RelativeDistribution doubled = rel;
    doubled.sigma_rel_sq *= 2.0;
    // Doubling s2 at least doubles the variance, so a smaller sample resolves the ordering.
    const long mono_samples = std::min(n_samples, std::max(n_samples / 10, 10000L));
    const double var_doubled = sample_f_moments(doubled, r_sum, mono_samples, rng).variance;
    VerificationCase mono{"variance increases with s2 " + tag, f_stats(doubled, r_sum).sigma_f,
                          std::sqrt(var_doubled), 0.0, 0.0, false};
    mono.pass = var_doubled > emp.variance && f_stats(doubled, r_sum).sigma_f > analytic.sigma_f;
    report.cases.push_back(mono);
  }

  const RelativeDistribution deterministic{{1.0, 0.0}, 0.0};
  const SampleMoments zero = sample_f_moments(deterministic, 0.5, std::min(n_samples, 1000L), rng);
  report.cases.push_back({"deterministic limit variance", 0.0, zero.variance, 0.0, 0.0,
                          zero.variance == 0.0});

  report.pass = report.failures() == 0;
  return report;
}

VerificationReport verify_cantelli(const std::vector<double>& ks, int n_configs, long n_samples,
                                 std::uint64_t seed) {
  if (ks.empty()) throw InvalidInput("verify_cantelli: no k values");
  VerificationReport report{"cantelli", n_samples, {}, false};
  std::mt19937_64 rng(seed);

  for (double k : ks) {
    if (!(k > 0.0)) throw InvalidInput("verify_cantelli: k must be positive");
    const double bound = 1.0 - cantelli_bound(k);
    const double std_error = std::sqrt(bound * (1.0 - bound) / static_cast<double>(n_samples));
    int generated = 0;
    while (generated < n_configs) {
      // Every other configuration sits within 0.01 sigma_f of the feasibility boundary.
      const bool near_boundary = generated % 2 == 0;
      const double s2 = uniform(rng, 1e-3, 0.5);
      const double ratio = uniform(rng, 0.0, 12.0);  // |mu_rel| / s
      const double m = ratio * std::sqrt(s2);
      const double angle = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const RelativeDistribution rel{Vec2::unit(angle) * m, s2};
      const double sigma_f = f_stats(rel, 1.0).sigma_f;
      const double margin = near_boundary ? uniform(rng, 1e-6, 0.01) * sigma_f
                                          : uniform(rng, 0.01, 2.0) * sigma_f;
      // mu_f - k sigma_f = margin  <=>  r_sum^2 = m^2 + 2 s^2 - k sigma_f - margin
      const double r2 = m * m + 2.0 * s2 - k * sigma_f - margin;
      if (!(r2 > 1e-4)) continue;
      const double r_sum = std::sqrt(r2);
      const ChanceStats stats = f_stats(rel, r_sum);
      if (!(chance_margin(stats, k) > 0.0)) continue;
      ++generated;

      const double p = sample_violation_probability(rel, r_sum, n_samples, rng);
      VerificationCase c;
      std::ostringstream label;
      label << "k=" << k << (near_boundary ? " boundary " : " interior ") << describe(rel, r_sum);
      c.label = label.str();
      c.analytic = bound;
      c.empirical = p;
      c.std_error = std_error;
      c.tolerance = 3.0 * std_error;
      c.pass = p <= bound + c.tolerance;
      report.cases.push_back(std::move(c));
    }
    // Deterministic configuration: no sampling noise, so no violation at all.
    const RelativeDistribution det{{2.0, 0.0}, 0.0};
    const double p = sample_violation_probability(det, 1.0, std::min(n_samples, 1000L), rng);
    std::ostringstream label;
    label << "k=" << k << " deterministic";
    report.cases.push_back({label.str(), 0.0, p, 0.0, 0.0, p == 0.0});
  }
  report.pass = report.failures() == 0;
  return report;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("invalid number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<BatchReport>& reports) {
  out << kRunsCsvHeader << '\n';
  for (const BatchReport& r : reports) {
    for (const BatchReport::Row& row : r.rows) {
      out << r.scenario << ',' << to_string(r.planner) << ',' << fmt_double(r.k) << ',' << row.seed
          << ',' << to_string(row.outcome) << ',' << fmt_double(row.length_m) << ','
          << fmt_double(row.time_s) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<BatchReport>& reports) {
  out << kSummaryCsvHeader << '\n';
  for (const BatchReport& r : reports) {
    out << r.scenario << ',' << to_string(r.planner) << ',' << fmt_double(r.k) << ',' << r.runs
        << ',' << fmt_double(r.success_rate) << ',' << fmt_double(r.mean_trajectory_length) << ','
        << fmt_double(r.mean_navigation_time) << '\n';
  }
}

std::vector<BatchReport> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != split_csv(kRunsCsvHeader)) {
    throw InvalidInput("runs csv: unexpected header");
  }
  std::map<std::tuple<std::string, std::string, double>, BatchReport> groups;
  std::vector<std::tuple<std::string, std::string, double>> order;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw InvalidInput("runs csv line " + std::to_string(line_no) + ": expected 7 fields");
    }
    const double k = parse_double(f[2]);
    const auto key = std::make_tuple(f[0], f[1], k);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      it->second.scenario = f[0];
      it->second.planner = planner_kind_from_string(f[1]);
      it->second.k = k;
    }
    std::uint64_t seed = 0;
    const auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), seed);
    if (res.ec != std::errc()) {
      throw InvalidInput("runs csv line " + std::to_string(line_no) + ": bad seed");
    }
    it->second.rows.push_back(
        {seed, outcome_from_string(f[4]), parse_double(f[5]), parse_double(f[6])});
  }
  std::vector<BatchReport> out;
  for (const auto& key : order) {
    BatchReport r = std::move(groups[key]);
    r.aggregate();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::filesystem::path> write_batch_outputs(const std::filesystem::path& dir,
                                                       const std::vector<BatchReport>& reports) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  const std::filesystem::path runs = dir / "runs.csv";
  const std::filesystem::path summary = dir / "summary.csv";
  {
    std::ofstream f(runs);
    if (!f) throw std::runtime_error("cannot open " + runs.string() + " for writing");
    write_runs_csv(f, reports);
    if (!f) throw std::runtime_error("write failed: " + runs.string());
  }
  {
    std::ofstream f(summary);
    if (!f) throw std::runtime_error("cannot open " + summary.string() + " for writing");
    write_summary_csv(f, reports);
    if (!f) throw std::runtime_error("write failed: " + summary.string());
  }
  return {runs, summary};
}

std::optional<std::filesystem::path> default_output_dir() {
  if (const char* env = std::getenv("CCVO_OUT_DIR"); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

}  // namespace ccvo
