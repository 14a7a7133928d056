#include "ccvo/world.hpp"

#include <string>

namespace ccvo {

std::string_view to_string(PedestrianKind kind) {
  switch (kind) {
    case PedestrianKind::kStatic:
      return "static";
    case PedestrianKind::kStraight:
      return "straight";
    case PedestrianKind::kCrossing:
      return "crossing";
    case PedestrianKind::kSocialForce:
      return "social_force";
  }
  return "unknown";
}

PedestrianKind pedestrian_kind_from_string(std::string_view name) {
  if (name == "static") return PedestrianKind::kStatic;
  if (name == "straight") return PedestrianKind::kStraight;
  if (name == "crossing") return PedestrianKind::kCrossing;
  if (name == "social_force") return PedestrianKind::kSocialForce;
  throw InvalidInput("unknown pedestrian kind '" + std::string(name) + "'");
}

std::vector<TruthObstacle> truth_obstacles(const WorldState& world) {
  std::vector<TruthObstacle> out;
  out.reserve(world.pedestrians.size() + world.static_obstacles.size());
  int id = 0;
  for (const Pedestrian& p : world.pedestrians) {
    out.push_back({DiscBody(p.position, p.radius), p.velocity, id++});
  }
  for (const DiscBody& d : world.static_obstacles) out.push_back({d, {}, id++});
  return out;
}

}  // namespace ccvo
