#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ccvo/geom.hpp"
#include "test_support.hpp"

using namespace ccvo;
using ccvo::testing::uniform;

namespace {

PinholeCamera default_camera() { return PinholeCamera::centered(457.0, 457.0, 640, 480); }

}  // namespace

TEST(Pinhole, BackprojectThenProjectRoundTrips) {
  const PinholeCamera cam = default_camera();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double px = uniform(rng, 0.0, 639.0);
    const double py = uniform(rng, 0.0, 479.0);
    const double depth = uniform(rng, 0.1, 20.0);
    const PixelDepth back = project_point(cam, backproject_pixel(cam, px, py, depth));
    EXPECT_NEAR(back.px, px, 1e-9);
    EXPECT_NEAR(back.py, py, 1e-9);
    EXPECT_NEAR(back.depth, depth, 1e-9);
  }
}

TEST(Pinhole, PrincipalPointMapsToOpticalAxis) {
  const PinholeCamera cam = default_camera();
  const Point3 p = backproject_pixel(cam, cam.cx(), cam.cy(), 3.0);
  EXPECT_DOUBLE_EQ(p.x, 0.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_DOUBLE_EQ(p.z, 3.0);
}

TEST(Pinhole, DefaultFieldOfViewIsSeventyDegrees) {
  EXPECT_NEAR(rad2deg(default_camera().fov_horizontal()), 70.0, 0.05);
}

TEST(Pinhole, RejectsNonPositiveDepth) {
  const PinholeCamera cam = default_camera();
  EXPECT_THROW(backproject_pixel(cam, 10.0, 10.0, 0.0), InvalidInput);
  EXPECT_THROW(backproject_pixel(cam, 10.0, 10.0, -1.0), InvalidInput);
  EXPECT_THROW(project_point(cam, {0.0, 0.0, 0.0}), InvalidInput);
  EXPECT_THROW(project_point(cam, {1.0, 0.0, -2.0}), InvalidInput);
}

TEST(Pinhole, RejectsBadIntrinsics) {
  EXPECT_THROW(PinholeCamera(0.0, 1.0, 10.0, 10.0, 20, 20), InvalidInput);
  EXPECT_THROW(PinholeCamera(1.0, 1.0, 30.0, 10.0, 20, 20), InvalidInput);
  EXPECT_THROW(PinholeCamera(1.0, 1.0, 10.0, 10.0, 0, 20), InvalidInput);
}

TEST(Lidar, PointNormsEqualRanges) {
  LidarScan scan;
  scan.fov = deg2rad(240.0);
  scan.max_range = 8.0;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 240; ++i) {
    scan.angles.push_back(deg2rad(-120.0 + i));
    scan.ranges.push_back(uniform(rng, 0.05, 8.0));
  }
  const auto points = lidar_to_points(scan);
  ASSERT_EQ(points.size(), scan.ranges.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_NEAR(points[i].norm(), scan.ranges[i], 1e-12);
    EXPECT_NEAR(robot_bearing(points[i]), scan.angles[i], 1e-12);
  }
}

TEST(Lidar, ForwardAndRightBeams) {
  LidarScan scan{{2.0, 3.0}, {0.0, std::numbers::pi / 2}, deg2rad(240.0), 8.0};
  const auto points = lidar_to_points(scan);
  EXPECT_NEAR(points[0].x, 0.0, 1e-15);
  EXPECT_NEAR(points[0].y, 2.0, 1e-15);
  EXPECT_NEAR(points[1].x, 3.0, 1e-15);
  EXPECT_NEAR(points[1].y, 0.0, 1e-15);
}

TEST(Lidar, ValidateRejectsBrokenScans) {
  EXPECT_THROW((LidarScan{{1.0}, {0.0, 0.1}, 1.0, 8.0}.validate()), InvalidInput);
  EXPECT_THROW((LidarScan{{9.0}, {0.0}, 1.0, 8.0}.validate()), InvalidInput);
  EXPECT_THROW((LidarScan{{0.0}, {0.0}, 1.0, 8.0}.validate()), InvalidInput);
  EXPECT_THROW((LidarScan{{1.0, 1.0}, {0.1, 0.1}, 1.0, 8.0}.validate()), InvalidInput);
  EXPECT_NO_THROW((LidarScan{{1.0, 8.0}, {0.0, 0.1}, 1.0, 8.0}.validate()));
}

TEST(Angles, NormalizeIsIdempotentAndInRange) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double a = uniform(rng, -50.0, 50.0);
    const double n = normalize_angle(a);
    EXPECT_GT(n, -std::numbers::pi);
    EXPECT_LE(n, std::numbers::pi);
    EXPECT_DOUBLE_EQ(normalize_angle(n), n);
    EXPECT_NEAR(std::cos(n), std::cos(a), 1e-9);
    EXPECT_NEAR(std::sin(n), std::sin(a), 1e-9);
  }
  EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
}

TEST(Pose, RobotFrameRoundTrip) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 pose({uniform(rng, -5, 5), uniform(rng, -5, 5)}, uniform(rng, -4, 4));
    const Vec2 v{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    const Vec2 back = pose.to_world(pose.to_robot(v));
    EXPECT_NEAR(back.x, v.x, 1e-12);
    EXPECT_NEAR(back.y, v.y, 1e-12);
    EXPECT_NEAR(pose.to_robot(v).norm(), v.norm(), 1e-12);
  }
}

TEST(Pose, ForwardIsRobotYAndRightIsRobotX) {
  const Pose2 pose({1.0, 2.0}, std::numbers::pi / 2);
  const Vec2 f = pose.to_robot({0.0, 1.0});
  EXPECT_NEAR(f.x, 0.0, 1e-15);
  EXPECT_NEAR(f.y, 1.0, 1e-15);
  const Vec2 r = pose.to_robot({1.0, 0.0});
  EXPECT_NEAR(r.x, 1.0, 1e-15);
  EXPECT_NEAR(r.y, 0.0, 1e-15);
}

TEST(Frames, CameraToRobotDropsHeight) {
  const Vec2 p = camera_to_robot({0.4, -1.0, 3.0});
  EXPECT_EQ(p, (Vec2{0.4, 3.0}));
}

TEST(Flow, WarpLeavingImageIsMissing) {
  const PinholeCamera cam = default_camera();
  EXPECT_FALSE(warp_in_frame(cam, {5.0, 5.0}, {-6.0, 0.0}).has_value());
  EXPECT_FALSE(warp_in_frame(cam, {635.0, 5.0}, {5.0, 0.0}).has_value());
  const auto inside = warp_in_frame(cam, {100.0, 100.0}, {2.5, -3.0});
  ASSERT_TRUE(inside.has_value());
  EXPECT_EQ(*inside, (Pixel{102.5, 97.0}));
}

TEST(Segment, DistanceMatchesDenseSampling) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Vec2 a = ccvo::testing::uniform_vec(rng, -3, 3);
    const Vec2 b = ccvo::testing::uniform_vec(rng, -3, 3);
    const Vec2 p = ccvo::testing::uniform_vec(rng, -3, 3);
    double best = 1e300;
    for (int j = 0; j <= 20000; ++j) {
      best = std::min(best, (p - (a + (b - a) * (j / 20000.0))).norm());
    }
    EXPECT_NEAR(point_segment_distance(p, a, b), best, 1e-3);
    EXPECT_LE(point_segment_distance(p, a, b), best + 1e-12);
  }
}

TEST(Segment, DegenerateSegmentIsPointDistance) {
  EXPECT_DOUBLE_EQ(point_segment_distance({3.0, 4.0}, {0.0, 0.0}, {0.0, 0.0}), 5.0);
}

TEST(Disc, RejectsNonPositiveRadius) {
  EXPECT_THROW(DiscBody({0.0, 0.0}, 0.0), InvalidInput);
}
