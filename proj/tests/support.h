#pragma once

// Small helpers for driving sessions from tests.

#include <optional>
#include <string>
#include <vector>

#include "ensemble/scene.h"
#include "ensemble/session.h"

namespace support {

using namespace ensemble;

inline Turn Say(Session& s, const std::string& text) {
  return s.Handle({s.NextTime(), Utterance{text}});
}

// Points from the human viewpoint at a ground point.
inline Turn PointAt(Session& s, double x, double z) {
  const scene::Scene& sc = s.scene();
  Vec3 target{x, sc.ground_plane_height, z};
  return s.Handle({s.NextTime(), Gesture{DeixisGesture{sc.human_viewpoint,
                                                       target - sc.human_viewpoint}}});
}

inline Turn Nod(Session& s, bool yes) {
  return s.Handle({s.NextTime(), Gesture{HeadGesture{yes}}});
}

inline Turn Shape(Session& s, const std::string& id) {
  return s.Handle({s.NextTime(), Gesture{StaticIconicGesture{id}}});
}

inline Turn Motion(Session& s, const std::string& id) {
  return s.Handle({s.NextTime(), Gesture{DynamicIconicGesture{id}}});
}

inline int Count(const std::vector<AgentMove>& moves, MoveKind kind) {
  int n = 0;
  for (const auto& m : moves) n += m.kind == kind;
  return n;
}

inline std::optional<semantics::SemanticForm> LastRecord(const std::vector<AgentMove>& moves) {
  std::optional<semantics::SemanticForm> out;
  for (const auto& m : moves) {
    if (m.action_record) out = m.action_record;
  }
  return out;
}

inline void Append(std::vector<AgentMove>& all, const Turn& t) {
  all.insert(all.end(), t.moves.begin(), t.moves.end());
}

inline scene::WorldObject Object(std::string id, std::string kind, Vec3 at,
                                 std::set<std::string> attributes = {},
                                 bool graspable = true) {
  scene::WorldObject o;
  o.id = std::move(id);
  o.kind = std::move(kind);
  o.position = at;
  o.attributes = std::move(attributes);
  o.graspable = graspable;
  return o;
}

inline scene::Scene MakeScene(std::vector<scene::WorldObject> objects) {
  scene::Scene s;
  s.objects = std::move(objects);
  scene::Validate(s);
  return s;
}

}  // namespace support
