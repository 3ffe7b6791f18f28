#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ensemble/scene.h"
#include "ensemble/semantics.h"

namespace ensemble::automaton {

// A stack symbol: the situational context of one discourse segment.
struct ContextFrame {
  std::optional<scene::DeixisTarget> indicated;
  std::set<std::string> held;  // physically persistent
  std::vector<semantics::Term> candidates;
  std::optional<semantics::SemanticForm> pending_form;
  std::optional<std::string> focus;  // referent of "it"
  std::string origin_state;          // state that pushed this frame

  friend bool operator==(const ContextFrame&, const ContextFrame&) = default;
};

struct HistoryEntry {
  std::string state;
  ContextFrame frame;  // value snapshot of the top frame on entry
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct Configuration {
  std::string state;
  std::vector<ContextFrame> stack;  // top = back(); never empty
  std::vector<HistoryEntry> history;

  const ContextFrame& top() const { return stack.back(); }
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

Configuration InitialConfiguration(std::string start_state);

std::set<std::string> HeldUnion(const std::vector<ContextFrame>& stack);

}  // namespace ensemble::automaton
