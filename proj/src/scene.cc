#include "ensemble/scene.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <utility>

#include "ensemble/error.h"
#include "json_util.h"

namespace ensemble::scene {

namespace {

constexpr std::string_view kWhat = "scene";

// Rays closer than this to horizontal are treated as parallel.
constexpr double kParallelEpsilon = 1e-12;

}  // namespace

const WorldObject* Scene::Find(std::string_view id) const {
  for (const auto& object : objects) {
    if (object.id == id) return &object;
  }
  return nullptr;
}

WorldObject* Scene::Find(std::string_view id) {
  return const_cast<WorldObject*>(std::as_const(*this).Find(id));
}

const WorldObject& Scene::Get(std::string_view id) const {
  const WorldObject* object = Find(id);
  if (object == nullptr) {
    throw Error(ErrorKind::kValidation,
                "no object '" + std::string(id) + "' in scene");
  }
  return *object;
}

WorldObject& Scene::Get(std::string_view id) {
  return const_cast<WorldObject&>(std::as_const(*this).Get(id));
}

Vec3 Scene::FrontOfAgent() const {
  double dx = human_viewpoint.x - agent_origin.x;
  double dz = human_viewpoint.z - agent_origin.z;
  double length = std::hypot(dx, dz);
  if (length == 0.0) {
    dx = 0.0;
    dz = 1.0;
    length = 1.0;
  }
  return {agent_origin.x + front_offset * dx / length, ground_plane_height,
          agent_origin.z + front_offset * dz / length};
}

bool Scene::InBounds(const Vec3& p) const {
  return p.IsFinite() && std::abs(p.x) <= extent && std::abs(p.z) <= extent;
}

void Validate(const Scene& scene) {
  auto fail = [](const std::string& message) {
    throw Error(ErrorKind::kValidation, "scene: " + message);
  };
  if (!(scene.deixis_region_radius > 0.0) ||
      !std::isfinite(scene.deixis_region_radius)) {
    fail("deixis_region_radius must be > 0");
  }
  if (!std::isfinite(scene.ground_plane_height)) {
    fail("ground_plane_height must be finite");
  }
  if (!scene.agent_origin.IsFinite() ||
      !(scene.agent_origin.y > scene.ground_plane_height)) {
    fail("agent_origin must lie above the ground plane");
  }
  if (!scene.human_viewpoint.IsFinite() ||
      !(scene.human_viewpoint.y > scene.ground_plane_height)) {
    fail("human_viewpoint must lie above the ground plane");
  }
  if (!(scene.front_offset >= 0.0) || !(scene.extent > 0.0)) {
    fail("front_offset must be >= 0 and extent > 0");
  }
  std::set<std::string_view> ids;
  for (const auto& object : scene.objects) {
    if (object.id.empty()) fail("object with empty id");
    if (!ids.insert(object.id).second) {
      fail("duplicate object id '" + object.id + "'");
    }
    if (!object.position.IsFinite()) {
      fail("object '" + object.id + "' has a non-finite position");
    }
    if (object.held_by && !object.graspable) {
      fail("object '" + object.id + "' is held but not graspable");
    }
  }
}

Scene LoadScene(std::string_view description) {
  using json_util::json;
  json doc = json_util::Parse(description, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  json_util::RejectUnknown(doc,
                           {"ground_plane_height", "agent_origin",
                            "human_viewpoint", "deixis_region_radius",
                            "front_offset", "extent", "objects"},
                           kWhat, "");
  Scene scene;
  if (doc.contains("ground_plane_height")) {
    scene.ground_plane_height = json_util::Number(
        doc["ground_plane_height"], kWhat, "ground_plane_height");
  }
  if (!doc.contains("agent_origin")) {
    json_util::Fail(kWhat, "agent_origin", "required");
  }
  scene.agent_origin =
      json_util::Vector(doc["agent_origin"], kWhat, "agent_origin");
  if (doc.contains("human_viewpoint")) {
    scene.human_viewpoint =
        json_util::Vector(doc["human_viewpoint"], kWhat, "human_viewpoint");
  } else {
    scene.human_viewpoint = scene.agent_origin + Vec3{0.0, 0.1, 2.0};
  }
  if (doc.contains("deixis_region_radius")) {
    scene.deixis_region_radius = json_util::Number(
        doc["deixis_region_radius"], kWhat, "deixis_region_radius");
  }
  if (doc.contains("front_offset")) {
    scene.front_offset =
        json_util::Number(doc["front_offset"], kWhat, "front_offset");
  }
  if (doc.contains("extent")) {
    scene.extent = json_util::Number(doc["extent"], kWhat, "extent");
  }
  if (doc.contains("objects")) {
    const json& objects = doc["objects"];
    if (!objects.is_array()) json_util::Fail(kWhat, "objects", "expected a list");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string field = "objects[" + std::to_string(i) + "]";
      const json& o = objects[i];
      json_util::RequireObject(o, kWhat, field);
      json_util::RejectUnknown(
          o, {"id", "kind", "attributes", "position", "graspable", "held_by"},
          kWhat, field);
      WorldObject object;
      if (!o.contains("id")) json_util::Fail(kWhat, field + ".id", "required");
      if (!o.contains("kind")) json_util::Fail(kWhat, field + ".kind", "required");
      if (!o.contains("position")) {
        json_util::Fail(kWhat, field + ".position", "required");
      }
      object.id = json_util::String(o["id"], kWhat, field + ".id");
      object.kind = json_util::String(o["kind"], kWhat, field + ".kind");
      object.position =
          json_util::Vector(o["position"], kWhat, field + ".position");
      if (o.contains("attributes")) {
        const json& attributes = o["attributes"];
        if (!attributes.is_array()) {
          json_util::Fail(kWhat, field + ".attributes", "expected a list");
        }
        for (const auto& a : attributes) {
          object.attributes.insert(
              json_util::String(a, kWhat, field + ".attributes"));
        }
      }
      if (o.contains("graspable")) {
        object.graspable =
            json_util::Boolean(o["graspable"], kWhat, field + ".graspable");
      }
      if (o.contains("held_by")) {
        object.held_by = json_util::String(o["held_by"], kWhat, field + ".held_by");
      }
      scene.objects.push_back(std::move(object));
    }
  }
  Validate(scene);
  return scene;
}

Scene LoadSceneFile(const std::string& path) {
  return LoadScene(json_util::ReadFile(path));
}

DeixisTarget ResolveDeixis(const Scene& scene, const Vec3& origin,
                           const Vec3& direction) {
  const double norm = direction.Norm();
  if (!direction.IsFinite() || !origin.IsFinite() || norm == 0.0) {
    throw Error(ErrorKind::kNoTarget, "pointing direction is degenerate");
  }
  if (std::abs(direction.y) <= kParallelEpsilon * norm) {
    throw Error(ErrorKind::kNoTarget, "pointing ray is parallel to the ground");
  }
  const double t = (scene.ground_plane_height - origin.y) / direction.y;
  if (!(t > 0.0)) {
    throw Error(ErrorKind::kNoTarget, "pointing ray does not reach the ground");
  }
  DeixisTarget target;
  target.location = origin + t * direction;
  target.location.y = scene.ground_plane_height;

  std::vector<std::pair<double, const std::string*>> in_region;
  for (const auto& object : scene.objects) {
    double d = HorizontalDistance(object.position, target.location);
    if (d <= scene.deixis_region_radius) in_region.emplace_back(d, &object.id);
  }
  std::sort(in_region.begin(), in_region.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, *a.second) < std::tie(b.first, *b.second);
  });
  for (const auto& [d, id] : in_region) target.objects_in_region.push_back(*id);
  return target;
}

DeixisTarget ResolveClick(const Scene& scene, double x, double z) {
  Vec3 ground{x, scene.ground_plane_height, z};
  return ResolveDeixis(scene, scene.human_viewpoint,
                       ground - scene.human_viewpoint);
}

std::vector<std::string> FilterByDescription(
    const std::vector<std::string>& candidates, const Scene& scene,
    std::string_view noun, const std::set<std::string>& attributes) {
  std::vector<std::string> kept;
  for (const auto& id : candidates) {
    const WorldObject& object = scene.Get(id);
    if (!noun.empty() && object.kind != noun) continue;
    if (!std::includes(object.attributes.begin(), object.attributes.end(),
                       attributes.begin(), attributes.end())) {
      continue;
    }
    kept.push_back(id);
  }
  return kept;
}

std::string Describe(const WorldObject& object) {
  std::string out = "the";
  for (const auto& attribute : object.attributes) out += " " + attribute;
  return out + " " + object.kind;
}

}  // namespace ensemble::scene
