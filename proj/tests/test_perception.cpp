#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ccvo/perception.hpp"
#include "test_support.hpp"

using namespace ccvo;

namespace {

SensorConfig quiet_sensors() {
  SensorConfig s;
  s.position_sigma = SigmaModel::constant(0.0, 1e-300);
  s.velocity_sigma = SigmaModel::constant(0.0, 1e-300);
  return s;
}

WorldState world_with(std::vector<Pedestrian> peds, Pose2 pose = Pose2({0.0, 0.0}, 0.0)) {
  WorldState w;
  w.robot.pose = pose;
  w.pedestrians = std::move(peds);
  return w;
}

Pedestrian ped_at(Vec2 p, Vec2 v = {}) {
  Pedestrian ped;
  ped.position = p;
  ped.velocity = v;
  return ped;
}

}  // namespace

TEST(Sigma, WorkedValues) {
  EXPECT_NEAR(eval_sigma(SigmaModel::affine(0.02, 0.01), 2.0), 0.04, 1e-15);
  EXPECT_NEAR(eval_sigma(SigmaModel::reciprocal_affine(0.01, 0.1), 2.0), 0.06, 1e-15);
  EXPECT_DOUBLE_EQ(eval_sigma(SigmaModel::constant(0.3), 7.0), 0.3);
}

TEST(Sigma, NeverBelowFloor) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double a = ccvo::testing::uniform(rng, -1.0, 1.0);
    const double b = ccvo::testing::uniform(rng, -1.0, 1.0);
    const double d = ccvo::testing::uniform(rng, 0.01, 10.0);
    for (const auto& m : {SigmaModel::constant(a, 0.05), SigmaModel::affine(a, b, 0.05),
                          SigmaModel::reciprocal_affine(a, b, 0.05)}) {
      EXPECT_GE(eval_sigma(m, d), 0.05);
    }
  }
}

TEST(Sigma, ValidateAndParse) {
  EXPECT_THROW(eval_sigma(SigmaModel::affine(0.1, 0.1), 0.0), InvalidInput);
  SigmaModel bad = SigmaModel::affine(0.1, 0.1);
  bad.params.pop_back();
  EXPECT_THROW(bad.validate(), InvalidInput);
  EXPECT_THROW(SigmaModel::constant(0.1, 0.0).validate(), InvalidInput);
  EXPECT_EQ(sigma_form_from_string("reciprocal_affine"), SigmaForm::kReciprocalAffine);
  EXPECT_THROW(sigma_form_from_string("cubic"), InvalidInput);
  EXPECT_DOUBLE_EQ(SigmaModel::affine(0.02, 0.01).max_over(1.0, 8.0), 0.1);
}

TEST(Observe, ZeroNoiseReturnsTruthInWorldAxes) {
  const WorldState w = world_with({ped_at({1.0, 3.0}, {-0.5, 0.2})}, Pose2({1.0, 0.0}, std::numbers::pi / 2));
  std::mt19937_64 rng(1);
  const auto obs = observe(w, quiet_sensors(), rng);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].source, ObservationSource::kCamera);
  EXPECT_NEAR(obs[0].mean_position.x, 0.0, 1e-12);
  EXPECT_NEAR(obs[0].mean_position.y, 3.0, 1e-12);
  ASSERT_TRUE(obs[0].mean_velocity.has_value());
  EXPECT_NEAR(obs[0].mean_velocity->x, -0.5, 1e-12);
  EXPECT_NEAR(obs[0].mean_velocity->y, 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(obs[0].distance_at_detection, 3.0);
  EXPECT_EQ(obs[0].truth_id, 0);
}

TEST(Observe, SideObstacleIsLidarOnlyWithInflatedRadius) {
  const WorldState w = world_with({ped_at({2.0, 0.0}, {0.0, 1.0})}, Pose2({0.0, 0.0}, std::numbers::pi / 2));
  std::mt19937_64 rng(1);
  const auto obs = observe(w, quiet_sensors(), rng);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].source, ObservationSource::kLidarOnly);
  EXPECT_FALSE(obs[0].mean_velocity.has_value());
  EXPECT_FALSE(obs[0].sigma_v.has_value());
  EXPECT_DOUBLE_EQ(obs[0].radius, 0.45);
}

TEST(Observe, OutsideLidarRangeOrFovIsOmitted) {
  std::mt19937_64 rng(1);
  // Behind the robot (bearing 180 deg) and beyond max range.
  const WorldState w = world_with({ped_at({0.0, -2.0}), ped_at({0.0, 9.0})},
                                  Pose2({0.0, 0.0}, std::numbers::pi / 2));
  EXPECT_TRUE(observe(w, quiet_sensors(), rng).empty());
}

TEST(Observe, OccludedObstacleIsOmitted) {
  std::mt19937_64 rng(1);
  const WorldState w = world_with({ped_at({0.0, 2.0}), ped_at({0.0, 4.0})},
                                  Pose2({0.0, 0.0}, std::numbers::pi / 2));
  const auto obs = observe(w, quiet_sensors(), rng);
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].truth_id, 0);
}

TEST(Observe, CameraOnlyInsideFov) {
  std::mt19937_64 rng(3);
  const SensorConfig s = quiet_sensors();
  for (int i = 0; i < 2000; ++i) {
    const Vec2 p = ccvo::testing::uniform_vec(rng, -7.0, 7.0);
    if (p.norm() < 0.6) continue;
    const WorldState w = world_with({ped_at(p)}, Pose2({0.0, 0.0}, 1.0));
    for (const auto& o : observe(w, s, rng)) {
      const double bearing = std::abs(robot_bearing(w.robot.pose.to_robot(p)));
      EXPECT_LE(bearing, s.lidar_fov / 2.0);
      EXPECT_EQ(o.source == ObservationSource::kCamera, bearing < s.camera_fov / 2.0);
    }
  }
}

TEST(Observe, ErrorsMatchDistanceDependentSigma) {
  SensorConfig s;
  const WorldState w = world_with({ped_at({0.0, 4.0}, {0.3, 0.0})}, Pose2({0.0, 0.0}, std::numbers::pi / 2));
  const double sp = eval_sigma(s.position_sigma, 4.0);
  const double sv = eval_sigma(s.velocity_sigma, 4.0);
  std::mt19937_64 rng(17);
  const int n = 100000;
  double mx = 0, mxx = 0, vx = 0, vxx = 0;
  for (int i = 0; i < n; ++i) {
    const auto o = observe(w, s, rng).at(0);
    const double ex = o.mean_position.x;
    const double ev = o.mean_velocity->x - 0.3;
    mx += ex;
    mxx += ex * ex;
    vx += ev;
    vxx += ev * ev;
    EXPECT_DOUBLE_EQ(o.sigma_p, sp);
  }
  mx /= n;
  vx /= n;
  const double var_p = mxx / n - mx * mx;
  const double var_v = vxx / n - vx * vx;
  EXPECT_LT(std::abs(mx), 3.0 * sp / std::sqrt(n));
  EXPECT_LT(std::abs(vx), 3.0 * sv / std::sqrt(n));
  // Var of the sample variance of a normal is 2 sigma^4 / n.
  EXPECT_LT(std::abs(var_p - sp * sp), 3.0 * sp * sp * std::sqrt(2.0 / n));
  EXPECT_LT(std::abs(var_v - sv * sv), 3.0 * sv * sv * std::sqrt(2.0 / n));
}

TEST(ErrorTracksTest, StationaryWithLagOneCorrelation) {
  const double rho = 0.9;
  std::mt19937_64 rng(5);
  const int n_tracks = 20000;
  double s = 0, ss = 0, cross = 0;
  ErrorTracks tracks(rho);
  for (int id = 0; id < n_tracks; ++id) {
    const double a = tracks.next(id, rng)[0];
    tracks.next(id, rng);
    const double b = tracks.next(id, rng)[0];
    s += b;
    ss += b * b;
    cross += a * b;
  }
  const double mean = s / n_tracks;
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(n_tracks));
  EXPECT_NEAR(ss / n_tracks, 1.0, 0.05);
  // Two steps apart: rho^2.
  EXPECT_NEAR(cross / n_tracks, rho * rho, 0.05);
}

TEST(ErrorTracksTest, ZeroCorrelationAndRangeChecks) {
  EXPECT_THROW(ErrorTracks(1.0), InvalidInput);
  EXPECT_THROW(ErrorTracks(-0.1), InvalidInput);
  ErrorTracks tracks(0.0);
  std::mt19937_64 rng(2);
  const int n = 20000;
  double cross = 0;
  for (int i = 0; i < n; ++i) cross += tracks.next(1, rng)[1] * tracks.next(1, rng)[1];
  EXPECT_NEAR(cross / n, 0.0, 0.05);
}

TEST(Velocity, WorkedExamples) {
  const Vec2 v = estimate_velocity({0.12, 0.0, 3.0}, {0.0, 0.0, 3.0}, 0.1, 0.0, {0.0, 0.0});
  EXPECT_NEAR(v.x, 1.2, 1e-12);
  EXPECT_NEAR(v.y, 0.0, 1e-12);
  // Robot ego-motion is added back.
  const Vec2 w = estimate_velocity({0.0, 0.0, 2.9}, {0.0, 0.0, 3.0}, 0.2, 0.1, {0.0, 1.0});
  EXPECT_NEAR(w.x, 0.0, 1e-12);
  EXPECT_NEAR(w.y, 0.0, 1e-12);
  EXPECT_THROW(estimate_velocity({}, {}, 0.1, 0.1, {}), InvalidInput);
  EXPECT_THROW(estimate_velocity({}, {}, 0.0, 0.1, {}), InvalidInput);
}

TEST(Velocity, ProjectBackprojectRouteRecoversSpeed) {
  const PinholeCamera cam = PinholeCamera::centered(457.0, 457.0, 640, 480);
  const Point3 c0{-0.3, 0.2, 4.0};
  const Point3 c1{-0.3 + 0.12, 0.2, 4.0};
  const PixelDepth s0 = project_point(cam, c0);
  const PixelDepth s1 = project_point(cam, c1);
  const Vec2 v = estimate_velocity(backproject_pixel(cam, s1.px, s1.py, s1.depth),
                                   backproject_pixel(cam, s0.px, s0.py, s0.depth), 0.1, 0.0, {});
  EXPECT_NEAR(v.x, 1.2, 1e-6);
  EXPECT_NEAR(v.y, 0.0, 1e-6);
}

TEST(Flow, DisplacementErrorExample) {
  EXPECT_NEAR(flow_displacement_error(4.09, 2.0, 457.0), 0.0179, 5e-5);
  EXPECT_THROW(flow_displacement_error(1.0, 0.0, 457.0), InvalidInput);
  EXPECT_THROW(flow_displacement_error(1.0, 1.0, 0.0), InvalidInput);
}

TEST(Radius, Inflation) {
  EXPECT_DOUBLE_EQ(inflate_radius(0.3), 0.45);
  EXPECT_DOUBLE_EQ(inflate_radius(0.3, 1.0), 0.3);
  EXPECT_THROW(inflate_radius(0.0), InvalidInput);
  EXPECT_THROW(inflate_radius(0.3, 0.9), InvalidInput);
}

TEST(Centroid, WorkedExampleAndEmptyMask) {
  SegmentationMask mask(4, 3);
  DepthImage depth(4, 3);
  mask.set(1, 0);
  mask.set(3, 2);
  depth.at(1, 0) = 2.0;
  depth.at(3, 2) = 4.0;
  const PixelDepth c = masked_centroid(mask, depth);
  EXPECT_DOUBLE_EQ(c.px, 2.0);
  EXPECT_DOUBLE_EQ(c.py, 1.0);
  EXPECT_DOUBLE_EQ(c.depth, 3.0);
  EXPECT_THROW(masked_centroid(SegmentationMask(4, 3), depth), NoDetection);
  // Masked pixels without depth do not count.
  SegmentationMask no_depth(4, 3);
  no_depth.set(0, 0);
  EXPECT_THROW(masked_centroid(no_depth, depth), NoDetection);
  EXPECT_THROW(masked_centroid(SegmentationMask(2, 2), depth), InvalidInput);
}

TEST(Render, CylinderColumnsMatchRayCircleOracle) {
  const PinholeCamera cam = PinholeCamera::centered(457.0, 457.0, 640, 480);
  const CylinderObstacle c{{0.5, 0.0, 4.0}, 0.3, 0.9};
  const SyntheticFrame frame = render_frame(cam, std::span(&c, 1));
  ASSERT_EQ(frame.masks.size(), 1u);
  const int mid = static_cast<int>(cam.cy());
  for (int u = 0; u < cam.width(); ++u) {
    const double a = (u - cam.cx()) / cam.fx();
    // Distance from the cylinder axis to the ray x = a z.
    const double dist = std::abs(c.center.x - a * c.center.z) / std::sqrt(1.0 + a * a);
    if (std::abs(dist - c.radius) < 1e-9) continue;
    EXPECT_EQ(frame.masks[0].at(u, mid), dist < c.radius) << "column " << u;
  }
  // Nearest surface along the ray through the axis: range |c| - r, scaled to z by c.z / |c|.
  const int u_axis = static_cast<int>(std::lround(project_point(cam, c.center).px));
  const double range = std::hypot(c.center.x, c.center.z);
  EXPECT_NEAR(frame.depth.at(u_axis, mid), (range - c.radius) * c.center.z / range, 1e-3);
}

TEST(Render, NearerObstacleOwnsOverlap) {
  const PinholeCamera cam = PinholeCamera::centered(457.0, 457.0, 640, 480);
  const std::vector<CylinderObstacle> cs{{{0.0, 0.0, 6.0}, 0.8, 0.9}, {{0.0, 0.0, 3.0}, 0.3, 0.9}};
  const SyntheticFrame frame = render_frame(cam, cs);
  const int u = static_cast<int>(cam.cx());
  const int v = static_cast<int>(cam.cy());
  EXPECT_TRUE(frame.masks[1].at(u, v));
  EXPECT_FALSE(frame.masks[0].at(u, v));
  EXPECT_GT(frame.masks[0].count(), 0u);
}

TEST(Motion, SyntheticLateralWalkerSpeed) {
  const PinholeCamera cam = PinholeCamera::centered(457.0, 457.0, 640, 480);
  const CylinderObstacle c0{{-0.4, 0.0, 4.0}, 0.3, 0.9};
  CylinderObstacle c1 = c0;
  c1.center.x += 0.12;
  const SyntheticFrame f0 = render_frame(cam, std::span(&c0, 1));
  const SyntheticFrame f1 = render_frame(cam, std::span(&c1, 1));
  const std::vector<Point3> disp{c0.center - c1.center};
  const FlowField flow = analytic_flow(cam, f1, disp);
  const MotionEstimate est =
      estimate_motion(cam, f1.masks[0], f1.depth, f0.depth, flow, 0.1, 0.0, {0.0, 0.0});
  EXPECT_GT(est.matched_pixels, 1000u);
  EXPECT_NEAR(est.velocity.x, 1.2, 0.02);
  EXPECT_NEAR(est.velocity.y, 0.0, 0.05);
}

TEST(Motion, FlowOfStaticSceneIsZero) {
  const PinholeCamera cam = PinholeCamera::centered(457.0, 457.0, 640, 480);
  const CylinderObstacle c{{0.0, 0.0, 3.0}, 0.3, 0.9};
  const SyntheticFrame f = render_frame(cam, std::span(&c, 1));
  const std::vector<Point3> disp{{0.0, 0.0, 0.0}};
  const FlowField flow = analytic_flow(cam, f, disp);
  for (const Vec2& v : flow.flow) {
    EXPECT_NEAR(v.x, 0.0, 1e-9);
    EXPECT_NEAR(v.y, 0.0, 1e-9);
  }
  EXPECT_THROW(analytic_flow(cam, f, std::vector<Point3>{}), InvalidInput);
}
