#include "ccvo/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ccvo {

std::string_view to_string(SigmaForm form) {
  switch (form) {
    case SigmaForm::kConstant:
      return "constant";
    case SigmaForm::kAffine:
      return "affine";
    case SigmaForm::kReciprocalAffine:
      return "reciprocal_affine";
  }
  return "unknown";
}

SigmaForm sigma_form_from_string(std::string_view name) {
  if (name == "constant") return SigmaForm::kConstant;
  if (name == "affine") return SigmaForm::kAffine;
  if (name == "reciprocal_affine") return SigmaForm::kReciprocalAffine;
  throw InvalidInput("unknown sigma form '" + std::string(name) + "'");
}

std::string_view to_string(ObservationSource source) {
  return source == ObservationSource::kCamera ? "camera" : "lidar_only";
}

SigmaModel SigmaModel::constant(double c, double floor) {
  return {SigmaForm::kConstant, {c}, floor};
}
SigmaModel SigmaModel::affine(double a, double b, double floor) {
  return {SigmaForm::kAffine, {a, b}, floor};
}
SigmaModel SigmaModel::reciprocal_affine(double a, double b, double floor) {
  return {SigmaForm::kReciprocalAffine, {a, b}, floor};
}

void SigmaModel::validate() const {
  if (!(floor > 0.0)) throw InvalidInput("sigma floor must be positive");
  const std::size_t want = form == SigmaForm::kConstant ? 1 : 2;
  if (params.size() != want) {
    throw InvalidInput("sigma form '" + std::string(to_string(form)) + "' takes " +
                       std::to_string(want) + " parameter(s)");
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw InvalidInput("sigma parameters must be finite");
  }
}

double SigmaModel::max_over(double d_min, double d_max) const {
  return std::max(eval_sigma(*this, d_min), eval_sigma(*this, d_max));
}

double eval_sigma(const SigmaModel& model, double distance) {
  if (!(distance > 0.0)) throw InvalidInput("eval_sigma: distance must be positive");
  double value = 0.0;
  switch (model.form) {
    case SigmaForm::kConstant:
      value = model.params.at(0);
      break;
    case SigmaForm::kAffine:
      value = model.params.at(0) + model.params.at(1) * distance;
      break;
    case SigmaForm::kReciprocalAffine:
      value = model.params.at(0) + model.params.at(1) / distance;
      break;
  }
  return std::max(value, model.floor);
}

ObstacleObservation ObstacleObservation::camera(Vec2 position, Vec2 velocity, double sigma_p,
                                                double sigma_v, double radius) {
  ObstacleObservation o;
  o.mean_position = position;
  o.mean_velocity = velocity;
  o.sigma_p = sigma_p;
  o.sigma_v = sigma_v;
  o.radius = radius;
  o.source = ObservationSource::kCamera;
  o.distance_at_detection = position.norm();
  return o;
}

ObstacleObservation ObstacleObservation::lidar_only(Vec2 position, double sigma_p, double radius) {
  ObstacleObservation o;
  o.mean_position = position;
  o.sigma_p = sigma_p;
  o.radius = radius;
  o.source = ObservationSource::kLidarOnly;
  o.distance_at_detection = position.norm();
  return o;
}

namespace {

bool occluded(const std::vector<TruthObstacle>& obstacles, std::size_t target, Vec2 origin,
              double target_range) {
  const Vec2 end = obstacles[target].body.center;
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    if (j == target) continue;
    const DiscBody& other = obstacles[j].body;
    if ((other.center - origin).norm() >= target_range) continue;
    if (point_segment_distance(other.center, origin, end) < other.radius) return true;
  }
  return false;
}

std::array<double, 4> standard_normals(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::array<double, 4> z{};
  for (double& v : z) v = n(rng);
  return z;
}

}  // namespace

ErrorTracks::ErrorTracks(double correlation) : correlation_(correlation) {
  if (!(correlation >= 0.0 && correlation < 1.0)) {
    throw InvalidInput("error correlation must lie in [0, 1)");
  }
}

std::array<double, 4> ErrorTracks::next(int id, std::mt19937_64& rng) {
  const auto fresh = standard_normals(rng);
  auto [it, inserted] = state_.try_emplace(id, fresh);
  if (!inserted) {
    const double innovation = std::sqrt(1.0 - correlation_ * correlation_);
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      it->second[i] = correlation_ * it->second[i] + innovation * fresh[i];
    }
  }
  return it->second;
}

std::vector<ObstacleObservation> observe(const WorldState& world, const SensorConfig& sensors,
                                         std::mt19937_64& rng, ErrorTracks* tracks) {
  const Pose2& pose = world.robot.pose;
  const auto obstacles = truth_obstacles(world);
  std::vector<ObstacleObservation> out;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const TruthObstacle& ob = obstacles[i];
    const Vec2 rel = ob.body.center - pose.position();
    const double d = rel.norm();
    if (d > sensors.lidar_max_range || d <= 0.0) continue;
    const double bearing = robot_bearing(pose.to_robot(rel));
    if (std::abs(bearing) > sensors.lidar_fov / 2.0) continue;
    if (occluded(obstacles, i, pose.position(), d)) continue;

    const auto z = tracks != nullptr ? tracks->next(ob.id, rng) : standard_normals(rng);
    const double sp = eval_sigma(sensors.position_sigma, d);
    const Vec2 position = rel + Vec2{z[0], z[1]} * sp;
    ObstacleObservation o;
    if (std::abs(bearing) < sensors.camera_fov / 2.0) {
      const double sv = eval_sigma(sensors.velocity_sigma, d);
      const Vec2 velocity = ob.velocity + Vec2{z[2], z[3]} * sv;
      o = ObstacleObservation::camera(position, velocity, sp, sv,
                                      inflate_radius(ob.body.radius, sensors.camera_radius_inflation));
    } else {
      o = ObstacleObservation::lidar_only(
          position, sp,
          inflate_radius(sensors.default_pedestrian_radius, sensors.lidar_radius_inflation));
    }
    o.distance_at_detection = d;
    o.truth_id = ob.id;
    out.push_back(o);
  }
  return out;
}

Vec2 estimate_velocity(Point3 p1, Point3 p0, double t1, double t0, Vec2 robot_velocity) {
  if (!(t1 > t0)) throw InvalidInput("estimate_velocity: t1 must be after t0");
  const Point3 delta = (p1 - p0) * (1.0 / (t1 - t0));
  return camera_to_robot(delta) + robot_velocity;
}

double flow_displacement_error(double flow_error_px, double depth, double focal_px) {
  if (!(focal_px > 0.0 && depth > 0.0)) {
    throw InvalidInput("flow_displacement_error: depth and focal length must be positive");
  }
  return flow_error_px * depth / focal_px;
}

double inflate_radius(double radius, double factor) {
  if (!(radius > 0.0)) throw InvalidInput("inflate_radius: radius must be positive");
  if (!(factor >= 1.0)) throw InvalidInput("inflate_radius: factor must be >= 1");
  return radius * factor;
}

// ---------------------------------------------------------------------------

std::size_t SegmentationMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

DepthImage::DepthImage(int w, int h)
    : width(w),
      height(h),
      depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()) {}

SyntheticFrame render_frame(const PinholeCamera& cam, std::span<const CylinderObstacle> obstacles) {
  const int w = cam.width();
  const int h = cam.height();
  SyntheticFrame frame{DepthImage(w, h), {}};
  std::vector<int> owner(static_cast<std::size_t>(w) * h, -1);

  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const CylinderObstacle& c = obstacles[k];
    for (int u = 0; u < w; ++u) {
      // Ray x = a z in the horizontal plane against the cylinder's circle.
      const double a = (u - cam.cx()) / cam.fx();
      const double qa = a * a + 1.0;
      const double qb = a * c.center.x + c.center.z;
      const double qc = c.center.x * c.center.x + c.center.z * c.center.z - c.radius * c.radius;
      const double disc = qb * qb - qa * qc;
      if (disc < 0.0) continue;
      const double z = (qb - std::sqrt(disc)) / qa;
      if (!(z > 0.0)) continue;
      for (int v = 0; v < h; ++v) {
        const double y = z * (v - cam.cy()) / cam.fy();
        if (std::abs(y - c.center.y) > c.half_height) continue;
        double& slot = frame.depth.at(u, v);
        if (z < slot) {
          slot = z;
          owner[static_cast<std::size_t>(v) * w + u] = static_cast<int>(k);
        }
      }
    }
  }

  frame.masks.assign(obstacles.size(), SegmentationMask(w, h));
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int k = owner[static_cast<std::size_t>(v) * w + u];
      if (k >= 0) frame.masks[static_cast<std::size_t>(k)].set(u, v);
    }
  }
  return frame;
}

FlowField analytic_flow(const PinholeCamera& cam, const SyntheticFrame& frame1,
                        std::span<const Point3> displacement_1_to_0) {
  if (displacement_1_to_0.size() != frame1.masks.size()) {
    throw InvalidInput("analytic_flow: one displacement per mask required");
  }
  FlowField field{cam.width(), cam.height(),
                  std::vector<Vec2>(static_cast<std::size_t>(cam.width()) * cam.height())};
  for (std::size_t k = 0; k < frame1.masks.size(); ++k) {
    const SegmentationMask& mask = frame1.masks[k];
    for (int v = 0; v < cam.height(); ++v) {
      for (int u = 0; u < cam.width(); ++u) {
        if (!mask.at(u, v)) continue;
        const Point3 p1 = backproject_pixel(cam, u, v, frame1.depth.at(u, v));
        const Point3 p0 = p1 + displacement_1_to_0[k];
        if (!(p0.z > 0.0)) continue;
        const PixelDepth s0 = project_point(cam, p0);
        field.flow[static_cast<std::size_t>(v) * cam.width() + u] = {s0.px - u, s0.py - v};
      }
    }
  }
  return field;
}

PixelDepth masked_centroid(const SegmentationMask& mask, const DepthImage& depth) {
  if (mask.width != depth.width || mask.height != depth.height) {
    throw InvalidInput("masked_centroid: mask and depth dimensions differ");
  }
  double sx = 0.0, sy = 0.0, sd = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double d = depth.at(x, y);
      if (!std::isfinite(d)) continue;
      sx += x;
      sy += y;
      sd += d;
      ++n;
    }
  }
  if (n == 0) throw NoDetection("masked_centroid: mask has no pixel with finite depth");
  const double inv = 1.0 / static_cast<double>(n);
  return {sx * inv, sy * inv, sd * inv};
}

MotionEstimate estimate_motion(const PinholeCamera& cam, const SegmentationMask& mask1,
                               const DepthImage& depth1, const DepthImage& depth0,
                               const FlowField& flow, double t1, double t0,
                               Vec2 robot_velocity) {
  const PixelDepth c1 = masked_centroid(mask1, depth1);
  MotionEstimate est;
  est.p1 = backproject_pixel(cam, c1.px, c1.py, c1.depth);

  double sx = 0.0, sy = 0.0, sd = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask1.height; ++y) {
    for (int x = 0; x < mask1.width; ++x) {
      if (!mask1.at(x, y) || !std::isfinite(depth1.at(x, y))) continue;
      const auto s0 = warp_in_frame(cam, Pixel{double(x), double(y)}, flow.at(x, y));
      if (!s0) continue;
      const int u0 = static_cast<int>(std::lround(s0->x));
      const int v0 = static_cast<int>(std::lround(s0->y));
      const double d0 = depth0.at(u0, v0);
      if (!std::isfinite(d0)) continue;
      sx += s0->x;
      sy += s0->y;
      sd += d0;
      ++n;
    }
  }
  if (n == 0) throw NoDetection("estimate_motion: no pixel has a previous-frame correspondence");
  const double inv = 1.0 / static_cast<double>(n);
  est.p0 = backproject_pixel(cam, sx * inv, sy * inv, sd * inv);
  est.matched_pixels = n;
  est.velocity = estimate_velocity(est.p1, est.p0, t1, t0, robot_velocity);
  return est;
}

}  // namespace ccvo
