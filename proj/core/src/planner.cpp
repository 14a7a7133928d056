#include "ccvo/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace ccvo {

namespace {
constexpr double kAngleSlack = 1e-12;
}

void KinematicLimits::validate() const {
  if (!(v_max > 0.0 && omega_max > 0.0 && dt > 0.0)) {
    throw InvalidInput("kinematic limits must be positive");
  }
}

void PlannerConfig::validate() const {
  if (!(k > 0.0 && horizon > 0.0 && robot_radius > 0.0 && collision_threshold > 0.0 &&
        assumed_ped_speed >= 0.0 && partial_horizon > 0.0 && preferred_speed > 0.0 &&
        baseline_sigma > 0.0)) {
    throw InvalidInput("planner parameters must be positive");
  }
  if (!(camera_fov > 0.0 && camera_fov < 2.0 * std::numbers::pi)) {
    throw InvalidInput("camera_fov must lie in (0, 2 pi)");
  }
  if (n_tau < 1) throw InvalidInput("n_tau must be >= 1");
  if (escape_headings < 4) throw InvalidInput("escape_headings must be >= 4");
  if (grid_speeds < 2 || grid_headings < 2) throw InvalidInput("grid counts must be >= 2");
}

int VelocityGrid::feasible_count() const {
  return static_cast<int>(
      std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.feasible(); }));
}

std::string_view to_string(PlanStatus status) {
  return status == PlanStatus::kOk ? "ok" : "stuck";
}

std::string_view to_string(PlannerKind kind) {
  return kind == PlannerKind::kOfvo ? "ofvo" : "prvo_baseline";
}

PlannerKind planner_kind_from_string(std::string_view name) {
  if (name == "ofvo") return PlannerKind::kOfvo;
  if (name == "prvo_baseline" || name == "prvo") return PlannerKind::kPrvoBaseline;
  throw InvalidInput("unknown planner '" + std::string(name) + "'");
}

bool fov_constraint(Vec2 v_robot, double fov) {
  if (v_robot.x == 0.0 && v_robot.y == 0.0) return true;
  return std::abs(std::atan2(v_robot.x, v_robot.y)) < fov / 2.0;
}

bool lidar_ped_constraint(Vec2 v, Vec2 p_o, double ped_speed, double threshold, double horizon,
                          int n_tau) {
  if (p_o.norm() <= threshold) {
    throw InvalidInput("lidar_ped_constraint: obstacle already within the collision threshold");
  }
  for (int j = 1; j <= n_tau; ++j) {
    const double tau = horizon * j / n_tau;
    if (!((v * tau - p_o).norm() - ped_speed * tau > threshold)) return false;
  }
  return true;
}

bool kinematic_feasible(Vec2 v, const Pose2& pose, const KinematicLimits& limits) {
  const double speed = v.norm();
  if (speed == 0.0) return true;
  if (speed > limits.v_max * (1.0 + 1e-12)) return false;
  if (limits.forward_only && v.dot(pose.forward()) < 0.0) return false;
  const double turn = std::abs(normalize_angle(v.angle() - pose.heading()));
  return turn <= limits.max_turn() + kAngleSlack;
}

Vec2 preferred_velocity(const Pose2& pose, Vec2 goal, double preferred_speed, double dt) {
  const Vec2 to_goal = goal - pose.position();
  const double dist = to_goal.norm();
  if (dist == 0.0) return {};
  return to_goal * (std::min(preferred_speed, dist / dt) / dist);
}

Command to_command(Vec2 v, const Pose2& pose, const KinematicLimits& limits) {
  if (!kinematic_feasible(v, pose, limits)) {
    throw ContractViolation("to_command: velocity violates the kinematic limits");
  }
  const double speed = v.norm();
  if (speed == 0.0) return {};
  const double turn = normalize_angle(v.angle() - pose.heading());
  return {speed, std::clamp(turn / limits.dt, -limits.omega_max, limits.omega_max)};
}

VelocityGrid make_velocity_grid(const Pose2& pose, const PlannerConfig& config,
                                const KinematicLimits& limits) {
  VelocityGrid grid;
  grid.samples.reserve(static_cast<std::size_t>(config.grid_speeds * config.grid_headings) + 1);
  VelocitySample zero;
  zero.kinematic = true;
  grid.samples.push_back(zero);
  const double turn = limits.max_turn();
  for (int h = 0; h < config.grid_headings; ++h) {
    const double offset = -turn + 2.0 * turn * h / (config.grid_headings - 1);
    const Vec2 dir = Vec2::unit(pose.heading() + offset);
    for (int s = 1; s <= config.grid_speeds; ++s) {
      VelocitySample sample;
      sample.velocity = dir * (limits.v_max * s / config.grid_speeds);
      sample.heading_offset = offset;
      sample.kinematic = kinematic_feasible(sample.velocity, pose, limits);
      grid.samples.push_back(sample);
    }
  }
  return grid;
}

namespace {

bool lidar_admissible(Vec2 v, Vec2 p_o, const PlannerConfig& config) {
  // Already inside C: only velocities that do not close the distance remain.
  if (p_o.norm() <= config.collision_threshold) return v.dot(p_o) <= 0.0;
  return lidar_ped_constraint(v, p_o, config.assumed_ped_speed, config.collision_threshold,
                              config.partial_horizon, config.n_tau);
}

void mark_ofvo(VelocityGrid& grid, std::span<const ObstacleObservation> observations,
               const Pose2& pose, const PlannerConfig& config, bool check_fov) {
  const ChanceCheck check = config.chance_check();
  for (VelocitySample& s : grid.samples) {
    if (!s.kinematic) continue;
    if (check_fov && config.enforce_fov) {
      s.fov = fov_constraint(pose.to_robot(s.velocity), config.camera_fov);
    }
    for (const ObstacleObservation& obs : observations) {
      if (obs.source == ObservationSource::kCamera) {
        if (s.chance && !is_feasible_chance(obs, s.velocity, check)) s.chance = false;
      } else if (s.lidar && !lidar_admissible(s.velocity, obs.mean_position, config)) {
        s.lidar = false;
      }
    }
  }
}

void mark_baseline(VelocityGrid& grid, std::span<const ObstacleObservation> observations,
                   const PlannerConfig& config) {
  std::vector<ObstacleObservation> views;
  views.reserve(observations.size());
  for (const auto& obs : observations) views.push_back(baseline_view(obs, config.baseline_sigma));
  const ChanceCheck check = config.chance_check();
  for (VelocitySample& s : grid.samples) {
    if (!s.kinematic) continue;
    for (const ObstacleObservation& obs : views) {
      if (!is_feasible_chance(obs, s.velocity, check)) {
        s.chance = false;
        break;
      }
    }
  }
}

/// Moving samples over the whole heading circle, ignoring the per-step turn limit.
VelocityGrid make_escape_grid(const Pose2& pose, const PlannerConfig& config,
                              const KinematicLimits& limits) {
  VelocityGrid grid;
  grid.samples.reserve(static_cast<std::size_t>(config.grid_speeds * config.escape_headings));
  for (int h = 0; h < config.escape_headings; ++h) {
    const double offset = normalize_angle(2.0 * std::numbers::pi * h / config.escape_headings);
    const Vec2 dir = Vec2::unit(pose.heading() + offset);
    for (int s = 1; s <= config.grid_speeds; ++s) {
      VelocitySample sample;
      sample.velocity = dir * (limits.v_max * s / config.grid_speeds);
      sample.heading_offset = offset;
      sample.kinematic = true;
      grid.samples.push_back(sample);
    }
  }
  return grid;
}

/// Replaces a standstill command with a turn in place toward the best heading that has a
/// feasible moving sample. A disc robot turning in place sweeps no area.
void add_escape_turn(PlanResult& result, const VelocityGrid& escape,
                     const KinematicLimits& limits) {
  if (result.command.linear != 0.0) return;
  const VelocitySample* best = nullptr;
  for (const VelocitySample& s : escape.samples) {
    if (!s.feasible()) continue;
    const double d = (s.velocity - result.preferred_velocity).norm();
    if (best == nullptr || d < (best->velocity - result.preferred_velocity).norm() - 1e-12 ||
        (std::abs(d - (best->velocity - result.preferred_velocity).norm()) <= 1e-12 &&
         std::abs(s.heading_offset) < std::abs(best->heading_offset))) {
      best = &s;
    }
  }
  if (best == nullptr) return;
  result.command.angular =
      std::clamp(best->heading_offset / limits.dt, -limits.omega_max, limits.omega_max);
}

}  // namespace

VelocityGrid evaluate_grid(std::span<const ObstacleObservation> observations, const Pose2& pose,
                           const PlannerConfig& config, const KinematicLimits& limits) {
  VelocityGrid grid = make_velocity_grid(pose, config, limits);
  mark_ofvo(grid, observations, pose, config, true);
  return grid;
}

ObstacleObservation baseline_view(const ObstacleObservation& obs, double sigma) {
  ObstacleObservation view = obs;
  view.sigma_p = sigma;
  view.sigma_v = sigma;
  if (obs.source == ObservationSource::kLidarOnly) view.mean_velocity = Vec2{};
  return view;
}

VelocityGrid evaluate_grid_baseline(std::span<const ObstacleObservation> observations,
                                    const Pose2& pose, const PlannerConfig& config,
                                    const KinematicLimits& limits) {
  VelocityGrid grid = make_velocity_grid(pose, config, limits);
  mark_baseline(grid, observations, config);
  return grid;
}

PlanResult select_velocity(const VelocityGrid& grid, const Pose2& pose, Vec2 v_pref,
                           const KinematicLimits& limits) {
  PlanResult result;
  result.preferred_velocity = v_pref;
  result.feasible_count = grid.feasible_count();
  const VelocitySample* best = nullptr;
  auto key = [&](const VelocitySample& s) {
    return std::make_tuple((s.velocity - v_pref).norm(), std::abs(s.heading_offset),
                           s.velocity.norm());
  };
  for (const VelocitySample& s : grid.samples) {
    if (!s.feasible()) continue;
    if (best == nullptr) {
      best = &s;
      continue;
    }
    const auto [d, h, v] = key(s);
    const auto [bd, bh, bv] = key(*best);
    if (d < bd - 1e-12 || (std::abs(d - bd) <= 1e-12 && std::tie(h, v) < std::tie(bh, bv))) {
      best = &s;
    }
  }
  if (best != nullptr) {
    result.status = PlanStatus::kOk;
    result.chosen_velocity = best->velocity;
    result.command = to_command(best->velocity, pose, limits);
  } else {
    result.status = PlanStatus::kStuck;
  }
  return result;
}

PlanResult plan(std::span<const ObstacleObservation> observations, const Pose2& pose,
                Vec2 /*robot_velocity*/, Vec2 goal, const PlannerConfig& config,
                const KinematicLimits& limits) {
  const Vec2 v_pref = preferred_velocity(pose, goal, config.preferred_speed, limits.dt);
  PlanResult result =
      select_velocity(evaluate_grid(observations, pose, config, limits), pose, v_pref, limits);
  if (config.escape_turn && result.command.linear == 0.0) {
    VelocityGrid escape = make_escape_grid(pose, config, limits);
    mark_ofvo(escape, observations, pose, config, false);
    add_escape_turn(result, escape, limits);
  }
  return result;
}

PlanResult plan_prvo_baseline(std::span<const ObstacleObservation> observations,
                              const Pose2& pose, Vec2 /*robot_velocity*/, Vec2 goal,
                              const PlannerConfig& config, const KinematicLimits& limits) {
  const Vec2 v_pref = preferred_velocity(pose, goal, config.preferred_speed, limits.dt);
  PlanResult result = select_velocity(evaluate_grid_baseline(observations, pose, config, limits),
                                      pose, v_pref, limits);
  if (config.escape_turn && result.command.linear == 0.0) {
    VelocityGrid escape = make_escape_grid(pose, config, limits);
    mark_baseline(escape, observations, config);
    add_escape_turn(result, escape, limits);
  }
  return result;
}

}  // namespace ccvo
