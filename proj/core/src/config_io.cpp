// Experiment configuration (JSON) and trajectory traces (JSON lines).
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "ccvo/bench.hpp"

namespace ccvo {

using json = nlohmann::ordered_json;

namespace {

template <typename T>
void read(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void read_deg(const json& j, const char* key, double& radians) {
  if (j.contains(key)) radians = deg2rad(j.at(key).get<double>());
}

SigmaModel sigma_from_json(const json& j, SigmaModel model) {
  if (j.contains("form")) model.form = sigma_form_from_string(j.at("form").get<std::string>());
  read(j, "params", model.params);
  read(j, "floor", model.floor);
  model.validate();
  return model;
}

// Degrees rounded to 1e-9 so 240 does not print as 239.99999999999997.
double to_deg(double radians) { return std::round(rad2deg(radians) * 1e9) / 1e9; }

json sigma_to_json(const SigmaModel& m) {
  return {{"form", std::string(to_string(m.form))}, {"params", m.params}, {"floor", m.floor}};
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  ExperimentConfig c;
  try {
    const json root = json::parse(json_text);
    if (!root.is_object()) throw ConfigError("config root must be an object");

    if (root.contains("scenario")) {
      const json& s = root.at("scenario");
      auto& p = c.scenario;
      read(s, "static_count", p.static_count);
      read(s, "dynamic_count", p.dynamic_count);
      read(s, "cross_count", p.cross_count);
      read(s, "social_count", p.social_count);
      read(s, "ped_speed_min", p.ped_speed_min);
      read(s, "ped_speed_max", p.ped_speed_max);
      read(s, "ped_radius", p.ped_radius);
      read(s, "static_radius_min", p.static_radius_min);
      read(s, "static_radius_max", p.static_radius_max);
      read(s, "social_gain", p.social_gain);
      read(s, "social_range", p.social_range);
      read(s, "time_limit", p.time_limit);
      read(s, "goal_tolerance", p.goal_tolerance);
      if (p.ped_speed_min < 0.0 || p.ped_speed_max < p.ped_speed_min) {
        throw ConfigError("scenario: invalid pedestrian speed range");
      }
      if (!(p.time_limit > 0.0)) throw ConfigError("scenario: time_limit must be positive");
    }

    if (root.contains("sensors")) {
      const json& s = root.at("sensors");
      auto& p = c.sensors;
      if (s.contains("camera")) {
        const json& cam = s.at("camera");
        const double fx = cam.value("fx", p.camera.fx());
        const double fy = cam.value("fy", p.camera.fy());
        const int w = cam.value("width", p.camera.width());
        const int h = cam.value("height", p.camera.height());
        p.camera = PinholeCamera(fx, fy, cam.value("cx", w / 2.0), cam.value("cy", h / 2.0), w, h);
      }
      read_deg(s, "camera_fov_deg", p.camera_fov);
      read_deg(s, "lidar_fov_deg", p.lidar_fov);
      read(s, "lidar_max_range", p.lidar_max_range);
      if (s.contains("position_sigma")) {
        p.position_sigma = sigma_from_json(s.at("position_sigma"), p.position_sigma);
      }
      if (s.contains("velocity_sigma")) {
        p.velocity_sigma = sigma_from_json(s.at("velocity_sigma"), p.velocity_sigma);
      }
      read(s, "default_pedestrian_radius", p.default_pedestrian_radius);
      read(s, "lidar_radius_inflation", p.lidar_radius_inflation);
      read(s, "camera_radius_inflation", p.camera_radius_inflation);
      read(s, "error_correlation", p.error_correlation);
    }

    if (root.contains("planner")) {
      const json& s = root.at("planner");
      auto& p = c.planner;
      read(s, "k", p.k);
      read(s, "horizon", p.horizon);
      read(s, "n_tau", p.n_tau);
      read(s, "robot_radius", p.robot_radius);
      read(s, "collision_threshold", p.collision_threshold);
      read_deg(s, "camera_fov_deg", p.camera_fov);
      read(s, "enforce_fov", p.enforce_fov);
      read(s, "assumed_ped_speed", p.assumed_ped_speed);
      read(s, "partial_horizon", p.partial_horizon);
      read(s, "preferred_speed", p.preferred_speed);
      read(s, "grid_speeds", p.grid_speeds);
      read(s, "grid_headings", p.grid_headings);
      read(s, "baseline_sigma", p.baseline_sigma);
      read(s, "escape_turn", p.escape_turn);
      read(s, "escape_headings", p.escape_headings);
    }

    if (root.contains("limits")) {
      const json& s = root.at("limits");
      auto& p = c.limits;
      read(s, "v_max", p.v_max);
      read(s, "omega_max", p.omega_max);
      read(s, "forward_only", p.forward_only);
      read(s, "dt", p.dt);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    c.planner.validate();
    c.limits.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_experiment_config(const ExperimentConfig& c) {
  const auto& sc = c.scenario;
  const auto& se = c.sensors;
  const auto& pl = c.planner;
  const auto& li = c.limits;
  json root = {
      {"scenario",
       {{"static_count", sc.static_count},
        {"dynamic_count", sc.dynamic_count},
        {"cross_count", sc.cross_count},
        {"social_count", sc.social_count},
        {"ped_speed_min", sc.ped_speed_min},
        {"ped_speed_max", sc.ped_speed_max},
        {"ped_radius", sc.ped_radius},
        {"static_radius_min", sc.static_radius_min},
        {"static_radius_max", sc.static_radius_max},
        {"social_gain", sc.social_gain},
        {"social_range", sc.social_range},
        {"time_limit", sc.time_limit},
        {"goal_tolerance", sc.goal_tolerance}}},
      {"sensors",
       {{"camera",
         {{"fx", se.camera.fx()},
          {"fy", se.camera.fy()},
          {"cx", se.camera.cx()},
          {"cy", se.camera.cy()},
          {"width", se.camera.width()},
          {"height", se.camera.height()}}},
        {"camera_fov_deg", to_deg(se.camera_fov)},
        {"lidar_fov_deg", to_deg(se.lidar_fov)},
        {"lidar_max_range", se.lidar_max_range},
        {"position_sigma", sigma_to_json(se.position_sigma)},
        {"velocity_sigma", sigma_to_json(se.velocity_sigma)},
        {"default_pedestrian_radius", se.default_pedestrian_radius},
        {"lidar_radius_inflation", se.lidar_radius_inflation},
        {"camera_radius_inflation", se.camera_radius_inflation},
        {"error_correlation", se.error_correlation}}},
      {"planner",
       {{"k", pl.k},
        {"horizon", pl.horizon},
        {"n_tau", pl.n_tau},
        {"robot_radius", pl.robot_radius},
        {"collision_threshold", pl.collision_threshold},
        {"camera_fov_deg", to_deg(pl.camera_fov)},
        {"enforce_fov", pl.enforce_fov},
        {"assumed_ped_speed", pl.assumed_ped_speed},
        {"partial_horizon", pl.partial_horizon},
        {"preferred_speed", pl.preferred_speed},
        {"grid_speeds", pl.grid_speeds},
        {"grid_headings", pl.grid_headings},
        {"baseline_sigma", pl.baseline_sigma},
        {"escape_turn", pl.escape_turn},
        {"escape_headings", pl.escape_headings}}},
      {"limits",
       {{"v_max", li.v_max},
        {"omega_max", li.omega_max},
        {"forward_only", li.forward_only},
        {"dt", li.dt}}},
  };
  return root.dump(2);
}

void write_trace_jsonl(std::ostream& out, const EpisodeResult& episode) {
  for (const TrajectoryPoint& p : episode.trajectory) {
    const json record = {{"time", p.time},
                         {"x", p.pose.position().x},
                         {"y", p.pose.position().y},
                         {"heading", p.pose.heading()},
                         {"chosen_vx", p.chosen_velocity.x},
                         {"chosen_vy", p.chosen_velocity.y},
                         {"feasible_count", p.feasible_count}};
    out << record.dump() << '\n';
  }
}

}  // namespace ccvo
