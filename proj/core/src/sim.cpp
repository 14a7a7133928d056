#include "ccvo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ccvo {

namespace {

Vec2 advance_velocity(const Pedestrian& ped, const WorldState& world) {
  switch (ped.model.kind) {
    case PedestrianKind::kStatic:
      return {};
    case PedestrianKind::kStraight:
    case PedestrianKind::kCrossing:
      return ped.velocity;
    case PedestrianKind::kSocialForce:
      return social_force_update(ped, world.pedestrians, world.robot, 0.0);
  }
  return {};
}

}  // namespace

WorldState step(const WorldState& world, Command command, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("step: dt must be positive");
  WorldState next = world;

  const Pose2& pose = world.robot.pose;
  const double mid_heading = pose.heading() + 0.5 * command.angular * dt;
  const Vec2 velocity = Vec2::unit(mid_heading) * command.linear;
  next.robot.pose = Pose2(pose.position() + velocity * dt, pose.heading() + command.angular * dt);
  next.robot.velocity = velocity;

  for (std::size_t i = 0; i < world.pedestrians.size(); ++i) {
    Pedestrian& p = next.pedestrians[i];
    p.velocity = advance_velocity(world.pedestrians[i], world);
    p.position += p.velocity * dt;
  }
  next.time = world.time + dt;
  return next;
}

double robot_clearance(const WorldState& world) {
  double gap = std::numeric_limits<double>::infinity();
  const Vec2 c = world.robot.pose.position();
  const double r = world.robot.radius;
  for (const Pedestrian& p : world.pedestrians) {
    gap = std::min(gap, (p.position - c).norm() - r - p.radius);
  }
  for (const DiscBody& d : world.static_obstacles) {
    gap = std::min(gap, (d.center - c).norm() - r - d.radius);
  }
  return gap;
}

bool detect_collision(const WorldState& world) {
  const Vec2 c = world.robot.pose.position();
  const double r = world.robot.radius;
  for (const Pedestrian& p : world.pedestrians) {
    if ((p.position - c).norm() < r + p.radius) return true;
  }
  for (const DiscBody& d : world.static_obstacles) {
    if ((d.center - c).norm() < r + d.radius) return true;
  }
  return false;
}

Vec2 social_force_update(const Pedestrian& ped, std::span<const Pedestrian> neighbors,
                         const RobotState& robot, double /*dt*/) {
  const double speed = ped.model.speed;
  Vec2 v{};
  const Vec2 to_goal = ped.model.goal - ped.position;
  const double dist = to_goal.norm();
  if (dist > 1e-9) v = to_goal * (std::min(speed, dist) / dist);

  const double gain = ped.model.repulsion_gain;
  const double range = ped.model.repulsion_range;
  if (gain > 0.0 && range > 0.0) {
    auto push = [&](Vec2 other, double other_radius) {
      const Vec2 away = ped.position - other;
      const double centers = away.norm();
      if (centers <= 1e-12) return;
      const double gap = centers - ped.radius - other_radius;
      v += away * (gain * std::exp(-gap / range) / centers);
    };
    for (const Pedestrian& n : neighbors) {
      if (&n == &ped || n.position == ped.position) continue;
      push(n.position, n.radius);
    }
    push(robot.pose.position(), robot.radius);
  }

  const double cap = 1.3 * speed;
  const double norm = v.norm();
  if (norm > cap && norm > 0.0) v = v * (cap / norm);
  return v;
}

// ---------------------------------------------------------------------------
// Scenarios

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"empty", "static", "dynamic", "cross", "social"};
  return names;
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

 private:
  std::mt19937_64 rng_;
};

constexpr int kMaxPlacementTries = 5000;

bool clear_of(Vec2 c, double r, std::span<const Pedestrian> peds, std::span<const DiscBody> discs,
              double gap) {
  for (const auto& p : peds) {
    if ((p.position - c).norm() < r + p.radius + gap) return false;
  }
  for (const auto& d : discs) {
    if ((d.center - c).norm() < r + d.radius + gap) return false;
  }
  return true;
}

Pedestrian make_walker(Vec2 position, double heading, double speed, double radius,
                       PedestrianKind kind) {
  Pedestrian p;
  p.position = position;
  p.radius = radius;
  p.model.kind = kind;
  p.model.speed = speed;
  p.model.goal = position + Vec2::unit(heading) * 40.0;
  p.velocity = Vec2::unit(heading) * speed;
  return p;
}

template <typename Place>
void place_n(int n, Place&& place) {
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementTries && !placed; ++attempt) placed = place();
    if (!placed) throw ConfigError("scenario: could not place all bodies without overlap");
  }
}

}  // namespace

std::pair<ScenarioSpec, WorldState> make_scenario(std::string_view name, std::uint64_t seed,
                                                  const ScenarioParams& params) {
  Sampler rng(seed);
  ScenarioSpec spec;
  spec.name = std::string(name);
  spec.time_limit = params.time_limit;
  spec.goal_tolerance = params.goal_tolerance;
  const double pr = params.ped_radius;
  auto ped_speed = [&] { return rng.uniform(params.ped_speed_min, params.ped_speed_max); };
  constexpr double kStartClearance = 1.5;

  if (name == "empty") {
    spec.bounds = {{-6.0, -6.0}, {6.0, 6.0}};
    do {
      spec.start = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
      spec.goal = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
    } while ((spec.goal - spec.start).norm() < 8.0);
    spec.start_heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  } else if (name == "static") {
    spec.bounds = {{-2.0, -5.0}, {13.0, 5.0}};
    spec.start = {0.0, 0.0};
    spec.goal = {11.0, 0.0};
    place_n(params.static_count, [&] {
      const double r = rng.uniform(params.static_radius_min, params.static_radius_max);
      const Vec2 c{rng.uniform(2.0, 9.0), rng.uniform(-2.0, 2.0)};
      if ((c - spec.start).norm() < r + 1.0 || (c - spec.goal).norm() < r + 1.0) return false;
      if (!clear_of(c, r, {}, spec.static_obstacles, 0.8)) return false;
      spec.static_obstacles.emplace_back(c, r);
      return true;
    });
  } else if (name == "dynamic") {
    spec.bounds = {{-6.0, -6.0}, {16.0, 6.0}};
    spec.start = {0.0, 0.0};
    spec.goal = {11.0, 0.0};
    place_n(params.dynamic_count, [&] {
      const Vec2 c{rng.uniform(4.0, 12.0), rng.uniform(-2.5, 2.5)};
      const double heading = std::numbers::pi + deg2rad(rng.uniform(-15.0, 15.0));
      const double speed = ped_speed();
      if (!clear_of(c, pr, spec.pedestrians, {}, 0.3)) return false;
      spec.pedestrians.push_back(make_walker(c, heading, speed, pr, PedestrianKind::kStraight));
      return true;
    });
  } else if (name == "cross") {
    spec.bounds = {{-3.0, -8.0}, {13.0, 8.0}};
    spec.start = {0.0, 0.0};
    spec.goal = {10.0, 0.0};
    // Spawn bearings stay outside the camera cone (+5 deg margin).
    const double min_slope = std::tan(deg2rad(35.0 + 5.0));
    int side = 1;
    place_n(params.cross_count, [&] {
      const double ay = rng.uniform(2.5, 6.0);
      const double x = rng.uniform(1.0, std::min(9.0, ay / min_slope));
      const Vec2 c{x, side * ay};
      const double heading = -side * std::numbers::pi / 2.0 + deg2rad(rng.uniform(-10.0, 10.0));
      const double speed = ped_speed();
      if (!clear_of(c, pr, spec.pedestrians, {}, 0.3)) return false;
      spec.pedestrians.push_back(make_walker(c, heading, speed, pr, PedestrianKind::kCrossing));
      side = -side;
      return true;
    });
  } else if (name == "social") {
    spec.bounds = {{-6.0, -6.0}, {14.0, 6.0}};
    spec.start = {0.0, 0.0};
    spec.goal = {10.0, 0.0};
    place_n(params.social_count, [&] {
      const Vec2 c{rng.uniform(2.0, 10.0), rng.uniform(-3.0, 3.0)};
      if ((c - spec.start).norm() < kStartClearance) return false;
      if (!clear_of(c, pr, spec.pedestrians, {}, 0.3)) return false;
      Pedestrian p;
      p.position = c;
      p.radius = pr;
      p.model.kind = PedestrianKind::kSocialForce;
      p.model.speed = ped_speed();
      p.model.repulsion_gain = params.social_gain;
      p.model.repulsion_range = params.social_range;
      if (rng.coin()) {
        p.model.goal = {-5.0, rng.uniform(-3.0, 3.0)};
      } else {
        p.model.goal = {rng.uniform(2.0, 10.0), c.y > 0.0 ? -5.0 : 5.0};
      }
      p.velocity = (p.model.goal - c) * (p.model.speed / (p.model.goal - c).norm());
      spec.pedestrians.push_back(p);
      return true;
    });
  } else {
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
  }
  return {spec, initial_world(spec, 0.2)};
}

WorldState initial_world(const ScenarioSpec& spec, double robot_radius) {
  WorldState world;
  world.robot.pose = Pose2(spec.start, spec.start_heading);
  world.robot.radius = robot_radius;
  world.pedestrians = spec.pedestrians;
  world.static_obstacles = spec.static_obstacles;
  world.bounds = spec.bounds;
  return world;
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kSuccess:
      return "success";
    case Outcome::kCollision:
      return "collision";
    case Outcome::kTimeout:
      return "timeout";
  }
  return "unknown";
}

Outcome outcome_from_string(std::string_view name) {
  if (name == "success") return Outcome::kSuccess;
  if (name == "collision") return Outcome::kCollision;
  if (name == "timeout") return Outcome::kTimeout;
  throw InvalidInput("unknown outcome '" + std::string(name) + "'");
}

double polyline_length(std::span<const TrajectoryPoint> trajectory) {
  double length = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    length += (trajectory[i].pose.position() - trajectory[i - 1].pose.position()).norm();
  }
  return length;
}

// ---------------------------------------------------------------------------

EpisodeResult run_episode(const ScenarioSpec& spec, PlannerKind planner_kind,
                          const ExperimentConfig& config, std::uint64_t seed,
                          const EpisodeOptions& options) {
  config.limits.validate();
  config.planner.validate();
  const double dt = config.limits.dt;
  WorldState world = initial_world(spec, config.planner.robot_radius);
  std::mt19937_64 perception_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  ErrorTracks error_tracks(config.sensors.error_correlation);

  EpisodeResult result;
  result.seed = seed;
  result.trajectory.push_back({0.0, world.robot.pose, {}, 0});
  result.min_clearance = robot_clearance(world);

  if (detect_collision(world)) {
    result.outcome = Outcome::kCollision;
    return result;
  }

  const auto max_steps = static_cast<long>(std::floor(spec.time_limit / dt + 1e-9));
  for (long n = 1;; ++n) {
    if ((world.robot.pose.position() - spec.goal).norm() <= spec.goal_tolerance) {
      result.outcome = Outcome::kSuccess;
      break;
    }
    if (n > max_steps) {
      result.outcome = Outcome::kTimeout;
      break;
    }
    const auto observations = observe(world, config.sensors, perception_rng, &error_tracks);
    const Pose2 pose = world.robot.pose;
    const PlanResult decision =
        planner_kind == PlannerKind::kOfvo
            ? plan(observations, pose, world.robot.velocity, spec.goal, config.planner,
                   config.limits)
            : plan_prvo_baseline(observations, pose, world.robot.velocity, spec.goal,
                                 config.planner, config.limits);
    if (options.shadow_baseline) {
      const int other = planner_kind == PlannerKind::kOfvo
                            ? evaluate_grid_baseline(observations, pose, config.planner,
                                                     config.limits)
                                  .feasible_count()
                            : evaluate_grid(observations, pose, config.planner, config.limits)
                                  .feasible_count();
      const int baseline = planner_kind == PlannerKind::kOfvo ? other : decision.feasible_count;
      const int ofvo = planner_kind == PlannerKind::kOfvo ? decision.feasible_count : other;
      ++result.shadow_steps;
      if (baseline > ofvo) ++result.shadow_excess_steps;
    }

    world = step(world, decision.command, dt);
    world.time = static_cast<double>(n) * dt;
    result.trajectory.push_back(
        {world.time, world.robot.pose, decision.chosen_velocity, decision.feasible_count});
    result.min_clearance = std::min(result.min_clearance, robot_clearance(world));
    if (detect_collision(world)) {
      result.outcome = Outcome::kCollision;
      break;
    }
  }
  result.trajectory_length = polyline_length(result.trajectory);
  result.navigation_time = result.trajectory.back().time;
  return result;
}

EpisodeResult run_seeded_episode(std::string_view scenario, PlannerKind planner_kind,
                                 const ExperimentConfig& config, std::uint64_t seed,
                                 const EpisodeOptions& options) {
  const auto [spec, world] = make_scenario(scenario, seed, config.scenario);
  return run_episode(spec, planner_kind, config, seed, options);
}

}  // namespace ccvo
