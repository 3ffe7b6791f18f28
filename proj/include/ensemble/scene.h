#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ensemble/geometry.h"

namespace ensemble::scene {

struct WorldObject {
  std::string id;
  std::string kind;  // noun label, e.g. "cup"
  std::set<std::string> attributes;
  Vec3 position;
  bool graspable = true;
  std::optional<std::string> held_by;

  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

// The simulated shared world. Objects keep the order of the scene file.
struct Scene {
  std::vector<WorldObject> objects;
  double ground_plane_height = 0.0;
  Vec3 agent_origin{0.0, 1.5, 0.0};
  // Where the human stands; rays for click-style deixis start here and the
  // "in front of you" region faces it.
  Vec3 human_viewpoint{0.0, 1.6, 2.0};
  double deixis_region_radius = 0.5;
  // Distance from the agent, toward the human, of the "in front of" region.
  double front_offset = 0.5;
  // Objects may only be placed where |x| <= extent and |z| <= extent.
  double extent = 5.0;

  const WorldObject* Find(std::string_view id) const;
  WorldObject* Find(std::string_view id);
  const WorldObject& Get(std::string_view id) const;  // throws kValidation
  WorldObject& Get(std::string_view id);

  // Ground point 'front_offset' meters from the agent toward the human.
  Vec3 FrontOfAgent() const;
  bool InBounds(const Vec3& p) const;

  friend bool operator==(const Scene&, const Scene&) = default;
};

// Throws Error(kValidation) naming the first violated invariant.
void Validate(const Scene& scene);

// Parses a scene document (JSON). Unknown fields are rejected; schema
// problems are reported with the line number and field path.
Scene LoadScene(std::string_view description);
Scene LoadSceneFile(const std::string& path);

struct DeixisTarget {
  Vec3 location;  // on the ground plane
  std::vector<std::string> objects_in_region;  // nearest first

  friend bool operator==(const DeixisTarget&, const DeixisTarget&) = default;
};

// Intersects the pointing ray with the ground plane and collects the objects
// within deixis_region_radius (horizontal distance) of the hit point, nearest
// first with ids breaking ties. Throws Error(kNoTarget) for rays that are
// parallel to the plane or point away from it.
DeixisTarget ResolveDeixis(const Scene& scene, const Vec3& origin,
                           const Vec3& direction);

// Ray from the human viewpoint through the ground point (x, z).
DeixisTarget ResolveClick(const Scene& scene, double x, double z);

// Keeps, in order, the candidates whose kind equals 'noun' (when non-empty)
// and which carry every attribute in 'attributes'.
std::vector<std::string> FilterByDescription(
    const std::vector<std::string>& candidates, const Scene& scene,
    std::string_view noun, const std::set<std::string>& attributes);

// "the blue cup"
std::string Describe(const WorldObject& object);

}  // namespace ensemble::scene
