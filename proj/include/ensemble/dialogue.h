#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ensemble/action_table.h"
#include "ensemble/agent_move.h"
#include "ensemble/automaton.h"
#include "ensemble/events.h"
#include "ensemble/lexicon.h"
#include "ensemble/scene.h"

namespace ensemble::dialogue {

struct GestureLexiconEntry {
  std::string shape_id;
  semantics::SemanticForm bound_form;  // e.g. grasp(cup)
  std::string pose;                    // pose annotation for the grasp
  std::uint64_t learned_at = 0;
  friend bool operator==(const GestureLexiconEntry&,
                         const GestureLexiconEntry&) = default;
};

class GestureLexicon {
 public:
  // Throws Error(kRebind) if the shape is already bound.
  void Bind(GestureLexiconEntry entry);
  bool Unbind(std::string_view shape_id);
  const GestureLexiconEntry* Find(std::string_view shape_id) const;
  const std::map<std::string, GestureLexiconEntry, std::less<>>& entries()
      const {
    return entries_;
  }

  std::string ToJson() const;
  static GestureLexicon FromJson(std::string_view json_text);
  void Save(const std::string& path) const;
  static GestureLexicon Load(const std::string& path);

 private:
  std::map<std::string, GestureLexiconEntry, std::less<>> entries_;
};

// One-shot learning: scans the demonstration for a referent (a noun phrase
// or a pointing gesture that singles out an object) and a grasp action, and
// binds 'shape_id' to grasp(referent). Throws kRebind when the shape is
// bound and kIncompleteDemonstration when the referent or the grasp is
// missing.
GestureLexiconEntry LearnGesture(GestureLexicon& lexicon,
                                 std::string shape_id,
                                 const std::vector<InputEvent>& demonstration,
                                 const scene::Scene& scene,
                                 const Lexicon& words,
                                 const semantics::ActionTable& actions,
                                 std::uint64_t now);

// Surface templates keyed by name, with {placeholder} fields.
class Templates {
 public:
  explicit Templates(std::map<std::string, std::string, std::less<>> entries)
      : entries_(std::move(entries)) {}

  bool Has(std::string_view key) const;
  // Missing keys fall back to 'fallback' (then to the key itself).
  std::string Format(std::string_view key,
                     const std::map<std::string, std::string>& fields,
                     std::string_view fallback = {}) const;

  static const Templates& Default();

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

Templates LoadTemplates(std::string_view json_text);

// Immutable resources shared by every session.
struct Resources {
  std::shared_ptr<const Lexicon> lexicon;
  std::shared_ptr<const semantics::ActionTable> actions;
  std::shared_ptr<const Templates> templates;
  std::shared_ptr<const automaton::Machine> machine;

  static const Resources& Default();
};

// Per-session mutable state the interaction machine's compose functions
// operate on.
class DialogueEnvironment : public automaton::Environment {
 public:
  DialogueEnvironment(scene::Scene scene, const Resources& resources);

  automaton::ContextFrame Sanitize(automaton::ContextFrame frame) const;
  AgentMove Render(const automaton::MoveTemplate& emit,
                   const automaton::ContextFrame& top) override;

  scene::Scene scene;
  GestureLexicon gestures;
  const Lexicon& lexicon;
  const semantics::ActionTable& actions;
  const Templates& templates;
};

// Compose functions referenced by the shipped machine definition.
automaton::ComposeRegistry InteractionComposeRegistry();

// The shipped interaction machine: Idle, AwaitObject, AwaitAction,
// InterpDeixis, DisambTarget, Execute and the epsilon router Route.
automaton::Machine BuildInteractionMachine();
std::string_view InteractionMachineDefinition();

// A question about the head candidate, phrased from the tentative
// composition of the pending form with it. Does not modify the frame.
// Throws Error(kInternal) when the frame has no candidates.
AgentMove ProposeCandidate(const automaton::ContextFrame& frame,
                           const scene::Scene& scene,
                           const Templates& templates);

struct Execution {
  std::vector<AgentMove> moves;
  bool performed = false;
  std::optional<semantics::SemanticForm> record;
};

// Applies a saturated action to the world:
//   reach(x)   no physical change
//   grasp(x)   x becomes held
//   put(x, d)  x moves to d and is released; grasp(x) is recorded as an
//              established precondition when it was not already
// Refuses (a confusion move, scene untouched) when the theme is not
// graspable or the destination is outside the scene bounds.
Execution ExecuteAction(const semantics::SemanticForm& form,
                        scene::Scene& scene,
                        const semantics::ActionTable& actions,
                        const Templates& templates);

// Resolves a location-valued term to a ground point.
Vec3 ResolveLocation(const semantics::Term& term, const scene::Scene& scene);

// Natural-language rendering of a term ("the blue cup", "in front of me").
std::string Render(const semantics::Term& term, const scene::Scene& scene,
                   bool agent_speaking = true);

}  // namespace ensemble::dialogue
