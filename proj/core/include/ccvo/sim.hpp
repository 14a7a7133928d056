#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccvo/perception.hpp"
#include "ccvo/planner.hpp"
#include "ccvo/world.hpp"

namespace ccvo {

/// Thrown for malformed or unknown scenario/experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

WorldState step(const WorldState& world, Command command, double dt);

/// Strict: bodies that merely touch do not collide.
bool detect_collision(const WorldState& world);

/// Smallest surface gap between the robot and any obstacle (negative when overlapping).
double robot_clearance(const WorldState& world);

/// Goal attraction at nominal speed plus exponential pairwise repulsion, clamped to 1.3x speed.
Vec2 social_force_update(const Pedestrian& ped, std::span<const Pedestrian> neighbors,
                         const RobotState& robot, double dt);

/// Densities and timing for the scenario generators.
struct ScenarioParams {
  int static_count = 8;
  int dynamic_count = 6;
  int cross_count = 10;
  int social_count = 12;
  double ped_speed_min = 0.3;
  double ped_speed_max = 0.7;
  double ped_radius = 0.3;
  double static_radius_min = 0.2;
  double static_radius_max = 0.4;
  double social_gain = 0.6;
  double social_range = 0.4;
  double time_limit = 60.0;
  double goal_tolerance = 0.3;
};

struct ScenarioSpec {
  std::string name;
  Vec2 start{};
  double start_heading = 0.0;
  Vec2 goal{};
  std::vector<Pedestrian> pedestrians;
  std::vector<DiscBody> static_obstacles;
  Bounds bounds{};
  double time_limit = 60.0;
  double goal_tolerance = 0.3;
};

const std::vector<std::string>& scenario_names();

std::pair<ScenarioSpec, WorldState> make_scenario(std::string_view name, std::uint64_t seed,
                                                  const ScenarioParams& params = {});

WorldState initial_world(const ScenarioSpec& spec, double robot_radius);

enum class Outcome { kSuccess, kCollision, kTimeout };

std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

struct TrajectoryPoint {
  double time = 0.0;
  Pose2 pose{};
  Vec2 chosen_velocity{};
  int feasible_count = 0;
  bool operator==(const TrajectoryPoint&) const = default;
};

struct EpisodeResult {
  Outcome outcome = Outcome::kTimeout;
  double trajectory_length = 0.0;
  double navigation_time = 0.0;
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t seed = 0;
  /// Steps where the baseline, fed the same observations, kept more feasible samples.
  int shadow_excess_steps = 0;
  int shadow_steps = 0;
  /// Minimum robot-obstacle surface gap seen along the trajectory.
  double min_clearance = 0.0;

  bool operator==(const EpisodeResult&) const = default;
};

/// The integration step is the planner's `limits.dt`.
struct EpisodeOptions {
  /// Also evaluate the baseline grid on each step's observations (no effect on motion).
  bool shadow_baseline = false;
};

struct ExperimentConfig {
  ScenarioParams scenario{};
  SensorConfig sensors{};
  PlannerConfig planner{};
  KinematicLimits limits{};
};

EpisodeResult run_episode(const ScenarioSpec& spec, PlannerKind planner_kind,
                          const ExperimentConfig& config, std::uint64_t seed,
                          const EpisodeOptions& options = {});

/// make_scenario + run_episode with the same seed.
EpisodeResult run_seeded_episode(std::string_view scenario, PlannerKind planner_kind,
                                 const ExperimentConfig& config, std::uint64_t seed,
                                 const EpisodeOptions& options = {});

double polyline_length(std::span<const TrajectoryPoint> trajectory);

}  // namespace ccvo
