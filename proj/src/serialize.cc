#include "ensemble/serialize.h"

#include <cstdio>

#include "ensemble/error.h"

namespace ensemble {

using nlohmann::json;

json ToJson(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 Vec3FromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorKind::kSchema, "expected [x, y, z]");
  }
  Vec3 v;
  double* out[] = {&v.x, &v.y, &v.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw Error(ErrorKind::kSchema, "expected [x, y, z]");
    *out[i] = j[i].get<double>();
  }
  return v;
}

json ToJson(const AgentMove& move) {
  json j{{"kind", MoveKindName(move.kind)}, {"text", move.text}};
  if (move.action_record) j["action_record"] = semantics::ToString(*move.action_record);
  if (move.named_candidate) {
    j["named_candidate"] = semantics::ToString(*move.named_candidate);
  }
  return j;
}

json ToJson(const automaton::ContextFrame& frame) {
  json j{{"origin_state", frame.origin_state},
         {"held", frame.held},
         {"candidates", json::array()}};
  for (const auto& c : frame.candidates) j["candidates"].push_back(semantics::ToString(c));
  j["pending_form"] =
      frame.pending_form ? json(semantics::ToString(*frame.pending_form)) : json();
  j["focus"] = frame.focus ? json(*frame.focus) : json();
  if (frame.indicated) {
    j["indicated"] = {{"location", ToJson(frame.indicated->location)},
                      {"objects", frame.indicated->objects_in_region}};
  } else {
    j["indicated"] = nullptr;
  }
  return j;
}

json ToJson(const scene::WorldObject& object) {
  json j{{"id", object.id},
         {"kind", object.kind},
         {"attributes", object.attributes},
         {"position", ToJson(object.position)},
         {"graspable", object.graspable}};
  j["held_by"] = object.held_by ? json(*object.held_by) : json();
  return j;
}

std::string Digest(const automaton::Configuration& config) {
  json frames = json::array();
  for (const auto& f : config.stack) frames.push_back(ToJson(f));
  std::string canonical = json{{"state", config.state}, {"stack", frames}}.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ensemble
