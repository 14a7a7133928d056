#include "ccvo/chance_vo.hpp"

#include <algorithm>
#include <cmath>

namespace ccvo {

RelativeDistribution relative_stats(const ObstacleObservation& obs, Vec2 robot_velocity,
                                    double t) {
  if (!(t > 0.0)) throw InvalidInput("relative_stats: horizon must be positive");
  const Vec2 v_obs = obs.mean_velocity.value_or(Vec2{});
  const double sv = obs.sigma_v.value_or(0.0);
  return {obs.mean_position + v_obs * t - robot_velocity * t,
          obs.sigma_p * obs.sigma_p + sv * sv * t * t};
}

ChanceStats f_stats(const RelativeDistribution& rel, double r_sum) {
  const double m2 = rel.mu_rel.squared_norm();
  const double s2 = rel.sigma_rel_sq;
  return {m2 + 2.0 * s2 - r_sum * r_sum, std::sqrt(4.0 * s2 * m2 + 4.0 * s2 * s2)};
}

ChanceStats f_stats(const ObstacleObservation& obs, Vec2 robot_velocity, double t, double r_sum) {
  if (!(r_sum > 0.0)) throw InvalidInput("f_stats: radius sum must be positive");
  return f_stats(relative_stats(obs, robot_velocity, t), r_sum);
}

double cantelli_bound(double k) {
  if (!(k > 0.0)) throw InvalidInput("cantelli_bound: k must be positive");
  return k * k / (1.0 + k * k);
}

double mean_clearance_minimizer(const ObstacleObservation& obs, Vec2 robot_velocity,
                                double horizon) {
  // mu_f(t) = |p - w t|^2 + 2 (sp^2 + sv^2 t^2) - r^2 with w = v - v_i.
  const Vec2 w = robot_velocity - obs.mean_velocity.value_or(Vec2{});
  const double sv = obs.sigma_v.value_or(0.0);
  const double curvature = w.squared_norm() + 2.0 * sv * sv;
  if (curvature <= 0.0) return 0.0;
  return std::clamp(obs.mean_position.dot(w) / curvature, 0.0, horizon);
}

bool is_feasible_chance(const ObstacleObservation& obs, Vec2 robot_velocity,
                        const ChanceCheck& check) {
  const double r_sum = check.robot_radius + obs.radius;
  auto ok = [&](double tau) {
    return chance_margin(f_stats(obs, robot_velocity, tau, r_sum), check.k) > kChanceSlack;
  };
  // Limit tau -> 0+ taken at a vanishing fraction of the horizon.
  const double tau_min = check.horizon * 1e-9;
  if (!ok(tau_min)) return false;
  const double tau_star = mean_clearance_minimizer(obs, robot_velocity, check.horizon);
  if (tau_star > tau_min && !ok(tau_star)) return false;
  for (int j = 1; j <= check.n_tau; ++j) {
    if (!ok(check.horizon * j / check.n_tau)) return false;
  }
  return true;
}

bool deterministic_vo_contains(Vec2 p_rel, Vec2 v_rel, double r_sum, double horizon) {
  const double speed_sq = v_rel.squared_norm();
  double t = 0.0;
  if (speed_sq > 0.0) t = std::clamp(p_rel.dot(v_rel) / speed_sq, 0.0, horizon);
  return (p_rel - v_rel * t).norm() < r_sum;
}

}  // namespace ccvo
