#include "ensemble/wire.h"

#include "ensemble/error.h"
#include "ensemble/serialize.h"

namespace ensemble::wire {

using nlohmann::json;

namespace {

[[noreturn]] void Bad(const std::string& message) {
  throw Error(ErrorKind::kSchema, message);
}

const json& Field(const json& j, const char* name, const std::string& type) {
  auto it = j.find(name);
  if (it == j.end()) Bad(type + " needs '" + name + "'");
  return *it;
}

std::string StringField(const json& j, const char* name, const std::string& type) {
  const json& v = Field(j, name, type);
  if (!v.is_string()) Bad(type + "." + name + " must be a string");
  return v.get<std::string>();
}

double NumberField(const json& j, const char* name, const std::string& type) {
  const json& v = Field(j, name, type);
  if (!v.is_number()) Bad(type + "." + name + " must be a number");
  return v.get<double>();
}

void OnlyKeys(const json& j, std::initializer_list<std::string_view> keys,
              const std::string& type) {
  for (const auto& [key, value] : j.items()) {
    if (key == "type" || key == "seq") continue;
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) Bad(type + " has unknown field '" + key + "'");
  }
}

}  // namespace

ClientMessage ParseClientMessage(const json& j) {
  if (!j.is_object()) Bad("message must be an object");
  ClientMessage message;
  if (auto it = j.find("seq"); it != j.end()) {
    if (!it->is_number_unsigned()) Bad("seq must be a non-negative integer");
    message.seq = it->get<std::uint64_t>();
  }
  const std::string type = StringField(j, "type", "message");
  if (type == "utterance") {
    OnlyKeys(j, {"text"}, type);
    message.body = UtteranceMessage{StringField(j, "text", type)};
  } else if (type == "deixis") {
    OnlyKeys(j, {"origin", "direction"}, type);
    try {
      message.body = DeixisMessage{Vec3FromJson(Field(j, "origin", type)),
                                   Vec3FromJson(Field(j, "direction", type))};
    } catch (const Error& e) {
      Bad("deixis: " + std::string(e.what()));
    }
  } else if (type == "deixis_click") {
    OnlyKeys(j, {"x", "z"}, type);
    message.body = DeixisClickMessage{NumberField(j, "x", type), NumberField(j, "z", type)};
  } else if (type == "gesture") {
    OnlyKeys(j, {"kind", "shape_id", "motion_id", "polarity"}, type);
    const std::string kind = StringField(j, "kind", type);
    if (kind == "static") {
      message.body = GestureMessage{StaticIconicGesture{StringField(j, "shape_id", type)}};
    } else if (kind == "dynamic") {
      message.body =
          GestureMessage{DynamicIconicGesture{StringField(j, "motion_id", type)}};
    } else if (kind == "head") {
      const std::string polarity = StringField(j, "polarity", type);
      if (polarity != "yes" && polarity != "no") Bad("polarity must be yes or no");
      message.body = GestureMessage{HeadGesture{polarity == "yes"}};
    } else {
      Bad("unknown gesture kind '" + kind + "'");
    }
  } else if (type == "learn_gesture") {
    OnlyKeys(j, {"shape_id"}, type);
    message.body = LearnGestureMessage{StringField(j, "shape_id", type)};
  } else if (type == "reset") {
    OnlyKeys(j, {}, type);
    message.body = ResetMessage{};
  } else {
    Bad("unknown message type '" + type + "'");
  }
  return message;
}

json ToJson(const ClientMessage& message) {
  json j = std::visit(
      [](const auto& body) -> json {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, UtteranceMessage>) {
          return {{"type", "utterance"}, {"text", body.text}};
        } else if constexpr (std::is_same_v<T, DeixisMessage>) {
          return {{"type", "deixis"},
                  {"origin", ensemble::ToJson(body.origin)},
                  {"direction", ensemble::ToJson(body.direction)}};
        } else if constexpr (std::is_same_v<T, DeixisClickMessage>) {
          return {{"type", "deixis_click"}, {"x", body.x}, {"z", body.z}};
        } else if constexpr (std::is_same_v<T, GestureMessage>) {
          if (const auto* s = std::get_if<StaticIconicGesture>(&body.gesture)) {
            return {{"type", "gesture"}, {"kind", "static"}, {"shape_id", s->shape_id}};
          }
          if (const auto* d = std::get_if<DynamicIconicGesture>(&body.gesture)) {
            return {{"type", "gesture"}, {"kind", "dynamic"}, {"motion_id", d->motion_id}};
          }
          if (const auto* h = std::get_if<HeadGesture>(&body.gesture)) {
            return {{"type", "gesture"},
                    {"kind", "head"},
                    {"polarity", h->positive ? "yes" : "no"}};
          }
          throw Error(ErrorKind::kSchema, "deixis is not a gesture message");
        } else if constexpr (std::is_same_v<T, LearnGestureMessage>) {
          return {{"type", "learn_gesture"}, {"shape_id", body.shape_id}};
        } else {
          return {{"type", "reset"}};
        }
      },
      message.body);
  if (message.seq) j["seq"] = *message.seq;
  return j;
}

std::optional<InputEvent> ToInputEvent(const ClientMessage& message,
                                       const scene::Scene& scene,
                                       std::uint64_t time) {
  InputEvent event;
  event.time = time;
  if (const auto* u = std::get_if<UtteranceMessage>(&message.body)) {
    event.payload = Utterance{u->text};
  } else if (const auto* d = std::get_if<DeixisMessage>(&message.body)) {
    event.payload = Gesture{DeixisGesture{d->origin, d->direction}};
  } else if (const auto* c = std::get_if<DeixisClickMessage>(&message.body)) {
    Vec3 target{c->x, scene.ground_plane_height, c->z};
    event.payload =
        Gesture{DeixisGesture{scene.human_viewpoint, target - scene.human_viewpoint}};
  } else if (const auto* g = std::get_if<GestureMessage>(&message.body)) {
    event.payload = g->gesture;
  } else {
    return std::nullopt;
  }
  return event;
}

json AgentMoveFrame(std::uint64_t seq, const AgentMove& move) {
  json j = ensemble::ToJson(move);
  j["type"] = "agent_move";
  j["seq"] = seq;
  return j;
}

json SceneStateFrame(std::uint64_t seq, const scene::Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) objects.push_back(ensemble::ToJson(o));
  return {{"type", "scene_state"}, {"seq", seq}, {"objects", objects}};
}

json StackDebugFrame(std::uint64_t seq, const automaton::Configuration& config) {
  json frames = json::array();
  for (const auto& f : config.stack) frames.push_back(ensemble::ToJson(f));
  return {{"type", "stack_debug"}, {"seq", seq}, {"state", config.state}, {"frames", frames}};
}

json ErrorFrame(std::uint64_t seq, const std::string& message) {
  return {{"type", "error"}, {"seq", seq}, {"message", message}};
}

}  // namespace ensemble::wire
