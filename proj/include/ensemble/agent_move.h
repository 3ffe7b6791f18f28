#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ensemble/semantics.h"

namespace ensemble {

enum class MoveKind { kAck, kQuestion, kAction, kConfusion };

std::string_view MoveKindName(MoveKind kind);
std::optional<MoveKind> ParseMoveKind(std::string_view name);

// One agent turn contribution. Actions carry a saturated record; questions
// name the candidate they ask about.
struct AgentMove {
  MoveKind kind = MoveKind::kAck;
  std::string text;
  std::optional<semantics::SemanticForm> action_record;
  std::optional<semantics::Term> named_candidate;

  friend bool operator==(const AgentMove&, const AgentMove&) = default;
};

std::string ToString(const AgentMove& move);

}  // namespace ensemble
