#pragma once

#include "ccvo/geom.hpp"
#include "ccvo/perception.hpp"

namespace ccvo {

/// Distribution of d_rel(t) = p_i + v_i t - v t, an isotropic Gaussian N(mu_rel, s^2 I).
struct RelativeDistribution {
  Vec2 mu_rel{};
  double sigma_rel_sq = 0.0;  ///< s^2, m^2
};

/// First two moments of f = |d_rel|^2 - r_sum^2.
struct ChanceStats {
  double mu_f = 0.0;     ///< m^2
  double sigma_f = 0.0;  ///< m^2
};

/// Strict-inequality slack for mu_f - k sigma_f > 0.
inline constexpr double kChanceSlack = 1e-12;

/// Observations without a velocity estimate are treated as stationary with sigma_v = 0.
RelativeDistribution relative_stats(const ObstacleObservation& obs, Vec2 robot_velocity, double t);

/// Exact moments of a scaled noncentral chi-squared with two degrees of freedom:
///   |d_rel|^2 / s^2 ~ chi2_2(lambda = |mu_rel|^2 / s^2)
/// so E|d_rel|^2 = m^2 + 2 s^2 and Var|d_rel|^2 = 4 s^2 m^2 + 4 s^4.
ChanceStats f_stats(const RelativeDistribution& rel, double r_sum);
ChanceStats f_stats(const ObstacleObservation& obs, Vec2 robot_velocity, double t, double r_sum);

/// One-sided Chebyshev (Cantelli) lower bound k^2 / (1 + k^2) on P(f > 0).
double cantelli_bound(double k);

/// mu_f - k sigma_f; positive means the chance constraint holds at this time.
inline double chance_margin(const ChanceStats& s, double k) { return s.mu_f - k * s.sigma_f; }

struct ChanceCheck {
  double robot_radius = 0.2;
  double k = 1.0;
  double horizon = 2.0;
  int n_tau = 10;
};

/// True iff mu_f(tau) - k sigma_f(tau) > 0 at every tau of the uniform grid
/// {T j / n_tau : j = 1..n_tau}, at tau -> 0+, and at the minimiser of mu_f over (0, T].
bool is_feasible_chance(const ObstacleObservation& obs, Vec2 robot_velocity,
                        const ChanceCheck& check);

/// Closed-form velocity obstacle membership: min over t in (0, T] of |p_rel - v_rel t| < r_sum.
/// v_rel is the robot velocity relative to the obstacle.
bool deterministic_vo_contains(Vec2 p_rel, Vec2 v_rel, double r_sum, double horizon);

/// Minimiser over [0, T] of E|d_rel(t)|^2, i.e. of mu_f(t).
double mean_clearance_minimizer(const ObstacleObservation& obs, Vec2 robot_velocity,
                                double horizon);

}  // namespace ccvo
