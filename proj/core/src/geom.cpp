#include "ccvo/geom.hpp"

#include <algorithm>

namespace ccvo {

double normalize_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

PinholeCamera::PinholeCamera(double fx, double fy, double cx, double cy, int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(fx > 0.0 && fy > 0.0)) throw InvalidInput("focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidInput("image size must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height)) {
    throw InvalidInput("principal point must lie inside the image");
  }
}

PinholeCamera PinholeCamera::centered(double fx, double fy, int width, int height) {
  return {fx, fy, width / 2.0, height / 2.0, width, height};
}

double PinholeCamera::fov_horizontal() const { return 2.0 * std::atan(width_ / (2.0 * fx_)); }

void LidarScan::validate() const {
  if (ranges.size() != angles.size()) throw InvalidInput("lidar ranges/angles size mismatch");
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (!(ranges[i] > 0.0 && ranges[i] <= max_range)) {
      throw InvalidInput("lidar range outside (0, max_range]");
    }
    if (i > 0 && !(angles[i] > angles[i - 1])) {
      throw InvalidInput("lidar angles must be strictly increasing");
    }
  }
}

Point3 backproject_pixel(const PinholeCamera& cam, double px, double py, double depth) {
  if (!(depth > 0.0)) throw InvalidInput("backproject_pixel: depth must be positive");
  return {(px * depth - cam.cx() * depth) / cam.fx(), (py * depth - cam.cy() * depth) / cam.fy(),
          depth};
}

PixelDepth project_point(const PinholeCamera& cam, Point3 p) {
  if (!(p.z > 0.0)) throw InvalidInput("project_point: point is behind the camera");
  return {cam.fx() * p.x / p.z + cam.cx(), cam.fy() * p.y / p.z + cam.cy(), p.z};
}

std::vector<Vec2> lidar_to_points(const LidarScan& scan) {
  std::vector<Vec2> points;
  points.reserve(scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double l = scan.ranges[i];
    points.push_back({l * std::sin(scan.angles[i]), l * std::cos(scan.angles[i])});
  }
  return points;
}

std::optional<Pixel> warp_in_frame(const PinholeCamera& cam, Pixel s1, Vec2 flow) {
  const Pixel s0 = flow_warp(s1, flow);
  if (!cam.contains(s0)) return std::nullopt;
  return s0;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len_sq = ab.squared_norm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

}  // namespace ccvo
