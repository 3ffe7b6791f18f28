#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ensemble/agent_move.h"
#include "ensemble/events.h"
#include "ensemble/frame.h"
#include "ensemble/scene.h"

namespace ensemble::wire {

// Client -> service messages. Trace files reuse these record kinds.
struct UtteranceMessage {
  std::string text;
};
struct DeixisMessage {
  Vec3 origin;
  Vec3 direction;
};
struct DeixisClickMessage {
  double x = 0.0;
  double z = 0.0;
};
struct GestureMessage {
  Gesture gesture;  // never DeixisGesture
};
struct LearnGestureMessage {
  std::string shape_id;
};
struct ResetMessage {};

using ClientBody =
    std::variant<UtteranceMessage, DeixisMessage, DeixisClickMessage,
                 GestureMessage, LearnGestureMessage, ResetMessage>;

struct ClientMessage {
  std::optional<std::uint64_t> seq;
  ClientBody body;
};

// Throws Error(kSchema) with a description of the problem.
ClientMessage ParseClientMessage(const nlohmann::json& j);
nlohmann::json ToJson(const ClientMessage& message);

// Converts a message carrying a human move into an input event. Clicks are
// cast from the scene's human viewpoint. Returns nullopt for control
// messages (learn_gesture, reset).
std::optional<InputEvent> ToInputEvent(const ClientMessage& message,
                                       const scene::Scene& scene,
                                       std::uint64_t time);

// Service -> client frames.
nlohmann::json AgentMoveFrame(std::uint64_t seq, const AgentMove& move);
nlohmann::json SceneStateFrame(std::uint64_t seq, const scene::Scene& scene);
nlohmann::json StackDebugFrame(std::uint64_t seq,
                               const automaton::Configuration& config);
nlohmann::json ErrorFrame(std::uint64_t seq, const std::string& message);

}  // namespace ensemble::wire
