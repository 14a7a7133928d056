#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccvo/geom.hpp"

namespace ccvo {

enum class PedestrianKind { kStatic, kStraight, kCrossing, kSocialForce };

std::string_view to_string(PedestrianKind kind);
PedestrianKind pedestrian_kind_from_string(std::string_view name);

struct PedestrianModel {
  PedestrianKind kind = PedestrianKind::kStraight;
  double speed = 0.0;  ///< nominal speed, m/s
  Vec2 goal{};
  double repulsion_gain = 0.0;   ///< social force only, m/s^2
  double repulsion_range = 0.3;  ///< social force only, m
};

struct Pedestrian {
  Vec2 position{};
  Vec2 velocity{};
  double radius = 0.3;
  PedestrianModel model{};
};

struct RobotState {
  Pose2 pose{};
  Vec2 velocity{};
  double radius = 0.2;
};

struct Bounds {
  Vec2 min{-10.0, -10.0};
  Vec2 max{10.0, 10.0};

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

struct WorldState {
  RobotState robot{};
  std::vector<Pedestrian> pedestrians;
  std::vector<DiscBody> static_obstacles;
  double time = 0.0;
  Bounds bounds{};
};

/// Ground-truth obstacle as seen by sensors: pedestrians first, then static discs.
struct TruthObstacle {
  DiscBody body;
  Vec2 velocity{};
  int id = 0;
};

std::vector<TruthObstacle> truth_obstacles(const WorldState& world);

}  // namespace ccvo
