#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccvo {

/// Raised when a caller passes arguments outside an operation's domain.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  constexpr double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  /// Angle of the vector measured counter-clockwise from +x.
  double angle() const { return std::atan2(y, x); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }

  static Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Planar pose. World frame: x/y right-handed, heading counter-clockwise from +x.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(Vec2 position, double heading)
      : position_(position), heading_(normalize_angle(heading)) {}

  Vec2 position() const { return position_; }
  double heading() const { return heading_; }
  Vec2 forward() const { return Vec2::unit(heading_); }
  /// Unit vector pointing to the robot's right.
  Vec2 right() const { return {std::sin(heading_), -std::cos(heading_)}; }

  /// World-aligned vector -> robot frame (x lateral to the right, y forward).
  Vec2 to_robot(Vec2 world_vec) const {
    return {world_vec.dot(right()), world_vec.dot(forward())};
  }
  /// Robot frame -> world-aligned vector.
  Vec2 to_world(Vec2 robot_vec) const {
    return right() * robot_vec.x + forward() * robot_vec.y;
  }

  bool operator==(const Pose2&) const = default;

 private:
  Vec2 position_{};
  double heading_ = 0.0;
};

struct DiscBody {
  Vec2 center{};
  double radius = 0.0;

  DiscBody() = default;
  DiscBody(Vec2 c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw InvalidInput("DiscBody radius must be positive");
  }
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Point3 operator+(Point3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Point3 operator-(Point3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Point3&) const = default;
};

/// Pixel coordinates; x runs along image columns, y along rows.
struct Pixel {
  double x = 0.0;
  double y = 0.0;
  constexpr bool operator==(const Pixel&) const = default;
};

struct PixelDepth {
  double px = 0.0;
  double py = 0.0;
  double depth = 0.0;
};

// Camera frame: x right, y down, z forward (optical axis).
// Robot frame:  x lateral (right), y forward; so camera (x, z) -> robot (x, y).
class PinholeCamera {
 public:
  PinholeCamera(double fx, double fy, double cx, double cy, int width, int height);

  /// Principal point at the image center.
  static PinholeCamera centered(double fx, double fy, int width, int height);

  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  int width() const { return width_; }
  int height() const { return height_; }
  /// 2 * atan(width / (2 fx)).
  double fov_horizontal() const;

  bool contains(Pixel p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width_ - 1.0 && p.y <= height_ - 1.0;
  }

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

struct LidarScan {
  std::vector<double> ranges;
  std::vector<double> angles;
  double fov = 0.0;
  double max_range = 0.0;

  /// Throws InvalidInput unless the scan invariants hold.
  void validate() const;
};

Point3 backproject_pixel(const PinholeCamera& cam, double px, double py, double depth);
PixelDepth project_point(const PinholeCamera& cam, Point3 p);

/// Scan point i = (l_i sin theta_i, l_i cos theta_i) in the robot frame.
std::vector<Vec2> lidar_to_points(const LidarScan& scan);

/// Previous-frame location of a pixel given the flow stored at it.
constexpr Pixel flow_warp(Pixel s1, Vec2 flow) { return {s1.x + flow.x, s1.y + flow.y}; }

/// flow_warp, reporting pixels that leave the image as missing.
std::optional<Pixel> warp_in_frame(const PinholeCamera& cam, Pixel s1, Vec2 flow);

/// Camera-frame point -> robot-frame planar position.
constexpr Vec2 camera_to_robot(Point3 p) { return {p.x, p.z}; }

/// Bearing of a robot-frame point, clockwise from forward (the lidar angle convention).
inline double robot_bearing(Vec2 robot_point) { return std::atan2(robot_point.x, robot_point.y); }

/// Distance from point to the segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace ccvo
