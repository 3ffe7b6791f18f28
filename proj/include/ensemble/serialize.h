#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ensemble/agent_move.h"
#include "ensemble/frame.h"
#include "ensemble/scene.h"

namespace ensemble {

nlohmann::json ToJson(const Vec3& v);
Vec3 Vec3FromJson(const nlohmann::json& j);  // [x, y, z]; throws kSchema

nlohmann::json ToJson(const AgentMove& move);
nlohmann::json ToJson(const automaton::ContextFrame& frame);
nlohmann::json ToJson(const scene::WorldObject& object);

// FNV-1a over the canonical JSON of (state, stack), as 16 hex digits.
std::string Digest(const automaton::Configuration& config);

}  // namespace ensemble
