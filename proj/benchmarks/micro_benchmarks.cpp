#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ccvo/bench.hpp"
#include "ccvo/chance_vo.hpp"

namespace {

using namespace ccvo;

std::vector<ObstacleObservation> crowd(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<ObstacleObservation> obs;
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 2) {
      obs.push_back(ObstacleObservation::lidar_only({u(rng), u(rng)}, 0.05, 0.45));
    } else {
      obs.push_back(ObstacleObservation::camera({u(rng), u(rng)}, {0.3, -0.2}, 0.05, 0.1, 0.3));
    }
  }
  return obs;
}

void BM_FStats(benchmark::State& state) {
  const auto obs = ObstacleObservation::camera({2.0, 1.0}, {0.5, 0.0}, 0.05, 0.1, 0.3);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f_stats(obs, {1.0, 0.0}, t, 0.5));
    t = t < 2.0 ? t + 0.1 : 0.1;
  }
}
BENCHMARK(BM_FStats);

void BM_FeasibilityCheck(benchmark::State& state) {
  const auto obs = ObstacleObservation::camera({3.0, 1.0}, {-0.5, 0.0}, 0.05, 0.1, 0.3);
  const ChanceCheck check{0.2, 1.0, 2.0, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(is_feasible_chance(obs, {0.2, 0.9}, check));
}
BENCHMARK(BM_FeasibilityCheck)->Arg(10)->Arg(100);

void BM_PlanStep(benchmark::State& state) {
  const auto obs = crowd(static_cast<int>(state.range(0)));
  const PlannerConfig cfg;
  const KinematicLimits lim;
  const Pose2 pose({0.0, 0.0}, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(plan(obs, pose, {}, {10.0, 0.0}, cfg, lim));
}
BENCHMARK(BM_PlanStep)->Arg(0)->Arg(5)->Arg(20);

void BM_BaselinePlanStep(benchmark::State& state) {
  const auto obs = crowd(static_cast<int>(state.range(0)));
  const PlannerConfig cfg;
  const KinematicLimits lim;
  const Pose2 pose({0.0, 0.0}, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_prvo_baseline(obs, pose, {}, {10.0, 0.0}, cfg, lim));
  }
}
BENCHMARK(BM_BaselinePlanStep)->Arg(5)->Arg(20);

void BM_Episode(benchmark::State& state) {
  const ExperimentConfig cfg;
  const char* scenario = scenario_names()[static_cast<std::size_t>(state.range(0))].c_str();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_seeded_episode(scenario, PlannerKind::kOfvo, cfg, seed++));
  }
  state.SetLabel(scenario);
}
BENCHMARK(BM_Episode)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
