#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ccvo/geom.hpp"
#include "ccvo/world.hpp"

namespace ccvo {

/// Raised when a segmentation mask contains no usable pixels.
class NoDetection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SigmaForm { kConstant, kAffine, kReciprocalAffine };

std::string_view to_string(SigmaForm form);
SigmaForm sigma_form_from_string(std::string_view name);

/// Distance-dependent standard deviation of a perceived quantity.
///   constant:          params = {c}      sigma = c
///   affine:            params = {a, b}   sigma = a + b d
///   reciprocal-affine: params = {a, b}   sigma = a + b / d
/// The evaluated value is never below `floor`.
struct SigmaModel {
  SigmaForm form = SigmaForm::kConstant;
  std::vector<double> params{0.0};
  double floor = 1e-9;

  static SigmaModel constant(double c, double floor = 1e-9);
  static SigmaModel affine(double a, double b, double floor = 1e-9);
  static SigmaModel reciprocal_affine(double a, double b, double floor = 1e-9);

  void validate() const;
  /// Largest value over distances in [d_min, d_max]; the forms are monotone so an endpoint wins.
  double max_over(double d_min, double d_max) const;
};

double eval_sigma(const SigmaModel& model, double distance);

enum class ObservationSource { kCamera, kLidarOnly };

std::string_view to_string(ObservationSource source);

/// One perceived obstacle.
///
/// `mean_position` is the obstacle center relative to the robot center, expressed
/// in world-aligned axes so it composes directly with world-frame velocities.
struct ObstacleObservation {
  Vec2 mean_position{};
  std::optional<Vec2> mean_velocity;
  double sigma_p = 0.0;
  std::optional<double> sigma_v;
  double radius = 0.0;
  ObservationSource source = ObservationSource::kCamera;
  double distance_at_detection = 0.0;
  int truth_id = -1;

  static ObstacleObservation camera(Vec2 position, Vec2 velocity, double sigma_p, double sigma_v,
                                    double radius);
  static ObstacleObservation lidar_only(Vec2 position, double sigma_p, double radius);
};

struct SensorConfig {
  PinholeCamera camera = PinholeCamera::centered(457.0, 457.0, 640, 480);
  /// Camera horizontal FOV used for visibility; defaults to 70 degrees.
  double camera_fov = deg2rad(70.0);
  double lidar_fov = deg2rad(240.0);
  double lidar_max_range = 8.0;
  SigmaModel position_sigma = SigmaModel::affine(0.02, 0.01);
  SigmaModel velocity_sigma = SigmaModel::affine(0.05, 0.05);
  double default_pedestrian_radius = 0.3;
  double lidar_radius_inflation = 1.5;
  double camera_radius_inflation = 1.0;
  /// Step-to-step correlation of one obstacle's perception error inside an episode.
  double error_correlation = 0.9;
};

/// Per-obstacle perception error state. Successive errors of one obstacle follow a stationary
/// AR(1) process on standardized components, so every single observation keeps the
/// N(truth, sigma(d)^2 I) marginal while consecutive errors are correlated.
class ErrorTracks {
 public:
  explicit ErrorTracks(double correlation);

  /// Standard-normal draws for position x, y and velocity x, y of obstacle `id`.
  std::array<double, 4> next(int id, std::mt19937_64& rng);

 private:
  double correlation_;
  std::map<int, std::array<double, 4>> state_;
};

/// Sampled observations of every obstacle visible to the lidar. Without `tracks` the errors
/// of successive calls are independent.
std::vector<ObstacleObservation> observe(const WorldState& world, const SensorConfig& sensors,
                                         std::mt19937_64& rng, ErrorTracks* tracks = nullptr);

Vec2 estimate_velocity(Point3 p1, Point3 p0, double t1, double t0, Vec2 robot_velocity);

double flow_displacement_error(double flow_error_px, double depth, double focal_px);

double inflate_radius(double radius, double factor = 1.5);

// -------------------------------------------------------------------------
// Synthetic frames: a stand-in for the segmentation and optical-flow networks.

struct SegmentationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  SegmentationMask() = default;
  SegmentationMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const;
};

/// Per-pixel depth in meters; +inf where nothing was hit.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depth;

  DepthImage() = default;
  DepthImage(int w, int h);
  double at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
};

/// Vertical cylinder in the camera frame (y down); `center.y` is its mid height.
struct CylinderObstacle {
  Point3 center{};
  double radius = 0.3;
  double half_height = 0.9;
};

struct SyntheticFrame {
  DepthImage depth;
  std::vector<SegmentationMask> masks;  ///< one per obstacle, in input order
};

SyntheticFrame render_frame(const PinholeCamera& cam, std::span<const CylinderObstacle> obstacles);

/// Per-pixel flow from frame 1 to frame 0 (s0 = s1 + flow). Zero outside masks.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<Vec2> flow;

  const Vec2& at(int x, int y) const { return flow[static_cast<std::size_t>(y) * width + x]; }
};

/// Ground-truth flow for obstacles translated by `displacement_1_to_0[i]` between frames.
FlowField analytic_flow(const PinholeCamera& cam, const SyntheticFrame& frame1,
                        std::span<const Point3> displacement_1_to_0);

PixelDepth masked_centroid(const SegmentationMask& mask, const DepthImage& depth);

struct MotionEstimate {
  Point3 p1{};
  Point3 p0{};
  Vec2 velocity{};  ///< absolute, robot-frame axes
  std::size_t matched_pixels = 0;
};

/// Current and previous 3D object position from a mask, two depth images and the flow,
/// then velocity via estimate_velocity.
MotionEstimate estimate_motion(const PinholeCamera& cam, const SegmentationMask& mask1,
                               const DepthImage& depth1, const DepthImage& depth0,
                               const FlowField& flow, double t1, double t0,
                               Vec2 robot_velocity);

}  // namespace ccvo
