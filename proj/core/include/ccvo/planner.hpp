#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ccvo/chance_vo.hpp"
#include "ccvo/geom.hpp"
#include "ccvo/perception.hpp"

namespace ccvo {

/// Raised when a caller violates an operation's precondition that it was expected to check.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct KinematicLimits {
  double v_max = 1.0;      ///< m/s
  double omega_max = 2.0;  ///< rad/s
  bool forward_only = true;
  double dt = 0.1;  ///< s

  void validate() const;
  /// Largest heading change reachable within one step.
  double max_turn() const { return omega_max * dt; }
};

struct PlannerConfig {
  double k = 1.0;
  double horizon = 2.0;  ///< T, s
  int n_tau = 10;
  double robot_radius = 0.2;
  /// C: minimum allowed distance to a pedestrian seen only by the lidar.
  double collision_threshold = 0.65;
  double camera_fov = deg2rad(70.0);
  bool enforce_fov = true;
  /// Assumed speed of pedestrians whose velocity is unknown.
  double assumed_ped_speed = 1.5;
  /// Look-ahead used for lidar-only pedestrians: one control step.
  double partial_horizon = 0.1;
  double preferred_speed = 1.0;
  int grid_speeds = 8;
  int grid_headings = 21;
  /// Distance-independent sigma the conservative baseline applies to position and velocity.
  double baseline_sigma = 0.45;
  /// When no moving sample is feasible, turn in place toward the best feasible heading.
  bool escape_turn = true;
  int escape_headings = 72;

  void validate() const;
  ChanceCheck chance_check() const { return {robot_radius, k, horizon, n_tau}; }
};

struct Command {
  double linear = 0.0;   ///< m/s
  double angular = 0.0;  ///< rad/s
  bool operator==(const Command&) const = default;
};

struct VelocitySample {
  Vec2 velocity{};             ///< world frame
  double heading_offset = 0.0;  ///< relative to the current heading
  bool kinematic = false;
  bool fov = true;
  bool chance = true;
  bool lidar = true;

  bool feasible() const { return kinematic && fov && chance && lidar; }
};

/// Polar samples over [0, v_max] x [heading - max_turn, heading + max_turn] plus the zero velocity.
struct VelocityGrid {
  std::vector<VelocitySample> samples;

  int feasible_count() const;
};

enum class PlanStatus { kOk, kStuck };

std::string_view to_string(PlanStatus status);

struct PlanResult {
  Vec2 chosen_velocity{};
  Command command{};
  int feasible_count = 0;
  PlanStatus status = PlanStatus::kStuck;
  Vec2 preferred_velocity{};
};

/// |atan2(v_lateral, v_forward)| < fov / 2 for a robot-frame velocity; zero is feasible.
bool fov_constraint(Vec2 v_robot, double fov);

/// Worst case over every pedestrian heading at `ped_speed`:
/// |v tau - p_o| - ped_speed tau > C at every tau = horizon j / n_tau.
bool lidar_ped_constraint(Vec2 v, Vec2 p_o, double ped_speed, double threshold, double horizon,
                          int n_tau);

bool kinematic_feasible(Vec2 v, const Pose2& pose, const KinematicLimits& limits);

Vec2 preferred_velocity(const Pose2& pose, Vec2 goal, double preferred_speed, double dt);

/// Unicycle command realising v; v must be kinematically feasible.
Command to_command(Vec2 v, const Pose2& pose, const KinematicLimits& limits);

VelocityGrid make_velocity_grid(const Pose2& pose, const PlannerConfig& config,
                                const KinematicLimits& limits);

/// Marks every grid sample against all constraint families.
VelocityGrid evaluate_grid(std::span<const ObstacleObservation> observations, const Pose2& pose,
                           const PlannerConfig& config, const KinematicLimits& limits);

/// Conservative baseline counterpart of evaluate_grid.
VelocityGrid evaluate_grid_baseline(std::span<const ObstacleObservation> observations,
                                    const Pose2& pose, const PlannerConfig& config,
                                    const KinematicLimits& limits);

/// Grid sample closest to v_pref among feasible ones; ties go to the smaller heading
/// deviation, then to the smaller speed.
PlanResult select_velocity(const VelocityGrid& grid, const Pose2& pose, Vec2 v_pref,
                           const KinematicLimits& limits);

/// Nearest-to-preferred selection; when the result would stand still and escape_turn is set, the command
/// turns in place toward the nearest-to-preferred feasible heading on the full circle.
PlanResult plan(std::span<const ObstacleObservation> observations, const Pose2& pose,
                Vec2 robot_velocity, Vec2 goal, const PlannerConfig& config,
                const KinematicLimits& limits);

/// Probabilistic VO without partial-observation handling: lidar-only obstacles are static
/// discs, no camera-FOV heading constraint, and a fixed conservative sigma for every obstacle.
PlanResult plan_prvo_baseline(std::span<const ObstacleObservation> observations,
                              const Pose2& pose, Vec2 robot_velocity, Vec2 goal,
                              const PlannerConfig& config, const KinematicLimits& limits);

/// Observation as the baseline sees it (conservative sigmas, lidar-only made static).
ObstacleObservation baseline_view(const ObstacleObservation& obs, double sigma);

enum class PlannerKind { kOfvo, kPrvoBaseline };

std::string_view to_string(PlannerKind kind);
PlannerKind planner_kind_from_string(std::string_view name);

}  // namespace ccvo
