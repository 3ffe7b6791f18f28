#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ensemble/agent_move.h"
#include "ensemble/error.h"
#include "ensemble/frame.h"
#include "ensemble/guard.h"
#include "ensemble/utterance.h"

namespace ensemble::automaton {

enum class Mode { kNpda, kDpda, kNfa, kDfa };

std::string_view ModeName(Mode mode);
std::optional<Mode> ParseMode(std::string_view name);

enum class StackOpKind { kNone, kPush, kPop, kRewrite, kFlush, kPopUntil };

// A stack operation as declared on a rule. Push and Rewrite take the frame
// produced by the rule's compose function (or the unchanged top).
struct StackOpSpec {
  StackOpKind kind = StackOpKind::kNone;
  std::string state;  // kPopUntil target
};

// A stack operation with its operand, for ExecStackOp.
struct StackOperation {
  StackOpKind kind = StackOpKind::kNone;
  std::optional<ContextFrame> frame;  // kPush / kRewrite
  std::string state;                  // kPopUntil

  static StackOperation Push(ContextFrame f) { return {StackOpKind::kPush, std::move(f), {}}; }
  static StackOperation Rewrite(ContextFrame f) { return {StackOpKind::kRewrite, std::move(f), {}}; }
  static StackOperation Pop() { return {StackOpKind::kPop, std::nullopt, {}}; }
  static StackOperation Flush() { return {StackOpKind::kFlush, std::nullopt, {}}; }
  static StackOperation PopUntil(std::string s) { return {StackOpKind::kPopUntil, std::nullopt, std::move(s)}; }
};

struct MoveTemplate {
  MoveKind kind = MoveKind::kAck;
  std::string key;  // template resource key
};

// Services a machine needs from its host while stepping.
class Environment {
 public:
  virtual ~Environment() = default;
  // Builds the move a rule emits, given the top frame after the transition.
  virtual AgentMove Render(const MoveTemplate& emit, const ContextFrame& top) = 0;
};

// Input to a rule's compose function (its continuation). 'read' is the top
// frame the rule's guard saw. 'base' is the frame the result will replace:
// the same frame for Push/Rewrite, the new top after Pop/Flush/PopUntil.
struct ComposeInput {
  const ContextFrame& read;
  const ContextFrame& base;
  const InputToken* token;  // nullptr on epsilon rules
  Environment& env;
  std::string_view from_state;
};

struct ComposeResult {
  ContextFrame frame;
  std::vector<AgentMove> moves;
};

using ComposeFn = std::function<ComposeResult(const ComposeInput&)>;
using ComposeRegistry = std::map<std::string, ComposeFn, std::less<>>;

struct TransitionRule {
  std::string from;
  std::optional<Terminal> input;  // nullopt: epsilon
  Guard guard;
  double weight = 1.0;
  StackOpSpec op;
  std::string to;
  std::optional<MoveTemplate> emit;
  std::string compose_name;
  ComposeFn compose;

  std::string Describe() const;
};

class Machine {
 public:
  // Throws Error(kSchema) on unknown states, weights outside (0, 1], or a
  // compose function on a rule whose stack op is None.
  Machine(std::vector<std::string> states, std::string start,
          std::vector<TransitionRule> rules);

  const std::vector<std::string>& states() const { return states_; }
  const std::string& start() const { return start_; }
  const std::vector<TransitionRule>& rules() const { return rules_; }
  Mode mode() const { return mode_; }
  bool deterministic() const {
    return mode_ == Mode::kDpda || mode_ == Mode::kDfa;
  }

  // Rules leaving 'state' on 'input' (nullopt = epsilon), declaration order.
  std::vector<const TransitionRule*> RulesFor(
      std::string_view state, std::optional<Terminal> input) const;

 private:
  friend Machine Restrict(const Machine& machine, Mode mode);

  std::vector<std::string> states_;
  std::string start_;
  std::vector<TransitionRule> rules_;
  Mode mode_ = Mode::kNpda;
};

// Returns the machine in 'mode' after checking the mode's restrictions:
//   DPDA  every weight is 1 and same-(state, input) guards are exclusive
//   NFA   no stack operations, no compose functions, trivial guards
//   DFA   NFA restrictions, weights 1, no epsilon rules, at most one rule
//         per (state, input)
// Throws Error(kMode) listing every offending rule.
Machine Restrict(const Machine& machine, Mode mode);

// Pure stack semantics.
//   Push      appends the frame (its origin_state is kept as given)
//   Pop       removes the top; on a lone bottom frame with candidates it
//             advances the candidate list instead; otherwise kStackUnderflow
//   Rewrite   replaces the top
//   Flush     leaves one frame holding only the union of held sets, and
//             starts a new history
//   PopUntil  pops until the top equals the history snapshot of the most
//             recent visit to the state (restoring the snapshot on the bottom
//             frame if no frame matches), keeping the held union on top; it
//             is Flush when the state was never visited
Configuration ExecStackOp(const Configuration& config,
                          const StackOperation& op);

using Rng = std::mt19937_64;

struct StepResult {
  Configuration config;
  std::vector<AgentMove> moves;
  const TransitionRule* rule = nullptr;
};

// One transition on 'token' (nullptr = epsilon). Among rules whose guard
// passes on the top frame, picks the highest weight (ties by declaration
// order) in deterministic modes and samples by normalized weight otherwise.
// Throws Error(kDeadInput) when no rule passes; errors from compose
// functions propagate. The input configuration is never modified.
StepResult Step(const Machine& machine, const Configuration& config,
                const InputToken* token, Environment& env, Rng& rng);

inline constexpr int kEpsilonBudget = 32;

struct RunError {
  ErrorKind kind = ErrorKind::kInternal;
  std::string message;
  std::size_t token_index = 0;
  friend bool operator==(const RunError&, const RunError&) = default;
};

using TraceEntry = std::variant<AgentMove, RunError>;

struct RunResult {
  Configuration config;
  std::vector<TraceEntry> trace;
};

// Takes epsilon transitions until none passes, at most kEpsilonBudget times.
// Budget exhaustion is reported as a kEpsilonBudget trace entry.
void Quiesce(const Machine& machine, RunResult& result, Environment& env,
             Rng& rng, std::size_t token_index);

// Left fold of Step over the tokens, quiescing after each one. Step errors
// become trace entries and leave the configuration unchanged.
RunResult Run(const Machine& machine, Configuration config,
              const std::vector<InputToken>& tokens, Environment& env,
              Rng& rng);

// Frame-free (NFA/DFA mode) reachability.
std::set<std::string> EpsilonClosure(const Machine& machine,
                                     std::set<std::string> states);
std::set<std::string> Successors(const Machine& machine,
                                 const std::set<std::string>& states,
                                 Terminal input);

// Environment that renders templates as bare acks; for machines without a
// dialogue host.
class NullEnvironment : public Environment {
 public:
  AgentMove Render(const MoveTemplate& emit, const ContextFrame& top) override;
};

// Machine definition documents (JSON); compose names resolve in 'registry'.
Machine LoadMachine(std::string_view json_text,
                    const ComposeRegistry& registry = {});
Machine LoadMachineFile(const std::string& path,
                        const ComposeRegistry& registry = {});

}  // namespace ensemble::automaton
