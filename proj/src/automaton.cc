#include "ensemble/automaton.h"

#include <algorithm>
#include <deque>

#include "json_util.h"

namespace ensemble::automaton {

Configuration InitialConfiguration(std::string start_state) {
  Configuration config;
  config.state = std::move(start_state);
  config.stack.emplace_back();
  config.stack.back().origin_state = config.state;
  config.history.push_back({config.state, config.stack.back()});
  return config;
}

std::set<std::string> HeldUnion(const std::vector<ContextFrame>& stack) {
  std::set<std::string> held;
  for (const auto& frame : stack) held.insert(frame.held.begin(), frame.held.end());
  return held;
}

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kNpda: return "npda";
    case Mode::kDpda: return "dpda";
    case Mode::kNfa: return "nfa";
    case Mode::kDfa: return "dfa";
  }
  return "npda";
}

std::optional<Mode> ParseMode(std::string_view name) {
  for (Mode m : {Mode::kNpda, Mode::kDpda, Mode::kNfa, Mode::kDfa}) {
    if (ModeName(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

std::string_view OpName(StackOpKind kind) {
  switch (kind) {
    case StackOpKind::kNone: return "none";
    case StackOpKind::kPush: return "push";
    case StackOpKind::kPop: return "pop";
    case StackOpKind::kRewrite: return "rewrite";
    case StackOpKind::kFlush: return "flush";
    case StackOpKind::kPopUntil: return "popuntil";
  }
  return "none";
}

std::string InputName(const std::optional<Terminal>& input) {
  return input ? std::string(TerminalSymbol(*input)) : "ε";
}

}  // namespace

std::string TransitionRule::Describe() const {
  std::string out = from + " --" + InputName(input);
  if (!guard.IsTrivial()) out += " [" + guard.source() + "]";
  out += " / " + std::string(OpName(op.kind));
  if (op.kind == StackOpKind::kPopUntil) out += ":" + op.state;
  if (!compose_name.empty()) out += " " + compose_name;
  return out + "--> " + to;
}

Machine::Machine(std::vector<std::string> states, std::string start,
                 std::vector<TransitionRule> rules)
    : states_(std::move(states)), start_(std::move(start)),
      rules_(std::move(rules)) {
  auto fail = [](const std::string& message) {
    throw Error(ErrorKind::kSchema, "machine: " + message);
  };
  auto known = [&](const std::string& s) {
    return std::find(states_.begin(), states_.end(), s) != states_.end();
  };
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].empty()) fail("empty state name");
    if (std::find(states_.begin(), states_.begin() + i, states_[i]) !=
        states_.begin() + i) {
      fail("duplicate state " + states_[i]);
    }
  }
  if (!known(start_)) fail("unknown start state '" + start_ + "'");
  for (const auto& rule : rules_) {
    if (!known(rule.from)) fail("unknown state '" + rule.from + "'");
    if (!known(rule.to)) fail("unknown state '" + rule.to + "'");
    if (!(rule.weight > 0.0 && rule.weight <= 1.0)) {
      fail(rule.Describe() + ": weight must be in (0, 1]");
    }
    if (rule.op.kind == StackOpKind::kPopUntil && !known(rule.op.state)) {
      fail(rule.Describe() + ": unknown state '" + rule.op.state + "'");
    }
    if (rule.compose && rule.op.kind == StackOpKind::kNone) {
      fail(rule.Describe() + ": a compose function needs a stack operation");
    }
  }
}

std::vector<const TransitionRule*> Machine::RulesFor(
    std::string_view state, std::optional<Terminal> input) const {
  std::vector<const TransitionRule*> out;
  for (const auto& rule : rules_) {
    if (rule.from == state && rule.input == input) out.push_back(&rule);
  }
  return out;
}

Machine Restrict(const Machine& machine, Mode mode) {
  std::vector<std::string> problems;
  const auto& rules = machine.rules();
  const bool finite = mode == Mode::kNfa || mode == Mode::kDfa;
  const bool deterministic = mode == Mode::kDpda || mode == Mode::kDfa;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const TransitionRule& r = rules[i];
    if (finite) {
      if (r.op.kind != StackOpKind::kNone) {
        problems.push_back(r.Describe() + ": uses the stack");
      }
      if (r.compose) problems.push_back(r.Describe() + ": composes frames");
      if (!r.guard.IsTrivial()) problems.push_back(r.Describe() + ": reads frames");
    }
    if (deterministic && r.weight != 1.0) {
      problems.push_back(r.Describe() + ": weight is not 1");
    }
    if (mode == Mode::kDfa && !r.input) {
      problems.push_back(r.Describe() + ": epsilon rule");
    }
    if (!deterministic) continue;
    for (std::size_t j = 0; j < i; ++j) {
      const TransitionRule& q = rules[j];
      if (q.from != r.from || q.input != r.input) continue;
      if (mode == Mode::kDfa) {
        problems.push_back(r.Describe() + ": second rule for (" + r.from +
                           ", " + InputName(r.input) + ")");
      } else if (!Exclusive(q.guard, r.guard)) {
        problems.push_back(r.Describe() + ": guard overlaps " + q.Describe());
      }
    }
  }
  if (!problems.empty()) {
    std::string message = "machine is not a valid " +
                          std::string(ModeName(mode)) + ":";
    for (const auto& p : problems) message += "\n  " + p;
    throw Error(ErrorKind::kMode, message);
  }
  Machine out = machine;
  out.mode_ = mode;
  return out;
}

Configuration ExecStackOp(const Configuration& config,
                          const StackOperation& op) {
  Configuration out = config;
  auto flush = [&] {
    ContextFrame bottom;
    bottom.held = HeldUnion(config.stack);
    out.stack.assign(1, std::move(bottom));
    out.history.clear();
  };
  switch (op.kind) {
    case StackOpKind::kNone:
      break;
    case StackOpKind::kPush:
      out.stack.push_back(op.frame.value());
      break;
    case StackOpKind::kRewrite:
      out.stack.back() = op.frame.value();
      break;
    case StackOpKind::kPop:
      if (out.stack.size() >= 2) {
        out.stack.pop_back();
      } else if (!out.stack.back().candidates.empty()) {
        auto& candidates = out.stack.back().candidates;
        candidates.erase(candidates.begin());
      } else {
        throw Error(ErrorKind::kStackUnderflow,
                    "pop on the bottom frame with nothing to advance");
      }
      break;
    case StackOpKind::kFlush:
      flush();
      break;
    case StackOpKind::kPopUntil: {
      auto visit = std::find_if(
          config.history.rbegin(), config.history.rend(),
          [&](const HistoryEntry& e) { return e.state == op.state; });
      if (visit == config.history.rend()) {
        flush();
        break;
      }
      const ContextFrame& snapshot = visit->frame;
      while (out.stack.size() > 1 && !(out.stack.back() == snapshot)) {
        out.stack.pop_back();
      }
      if (!(out.stack.back() == snapshot)) out.stack.back() = snapshot;
      out.stack.back().held = HeldUnion(config.stack);
      break;
    }
  }
  return out;
}

namespace {

std::vector<const TransitionRule*> Passing(const Machine& machine,
                                           const Configuration& config,
                                           std::optional<Terminal> input) {
  std::vector<const TransitionRule*> passing;
  for (const TransitionRule* rule : machine.RulesFor(config.state, input)) {
    if (rule->guard.Evaluate(config.top())) passing.push_back(rule);
  }
  return passing;
}

const TransitionRule* Choose(const Machine& machine,
                             const std::vector<const TransitionRule*>& passing,
                             Rng& rng) {
  if (passing.size() == 1) return passing.front();
  if (machine.deterministic()) {
    const TransitionRule* best = passing.front();
    for (const TransitionRule* r : passing) {
      if (r->weight > best->weight) best = r;
    }
    return best;
  }
  double total = 0.0;
  for (const TransitionRule* r : passing) total += r->weight;
  // 53 random bits, independent of the standard library's distributions.
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
  for (const TransitionRule* r : passing) {
    if (u < r->weight) return r;
    u -= r->weight;
  }
  return passing.back();
}

}  // namespace

StepResult Step(const Machine& machine, const Configuration& config,
                const InputToken* token, Environment& env, Rng& rng) {
  std::optional<Terminal> input;
  if (token != nullptr) input = token->terminal;
  std::vector<const TransitionRule*> passing = Passing(machine, config, input);
  if (passing.empty()) {
    throw Error(ErrorKind::kDeadInput, "no transition from " + config.state +
                                           " on " + InputName(input));
  }
  const TransitionRule& rule = *Choose(machine, passing, rng);

  StepResult result;
  result.rule = &rule;
  const ContextFrame& read = config.top();
  StackOperation op;
  op.kind = rule.op.kind;
  op.state = rule.op.state;
  switch (rule.op.kind) {
    case StackOpKind::kPush:
    case StackOpKind::kRewrite: {
      ContextFrame frame = read;
      if (rule.compose) {
        ComposeResult composed =
            rule.compose(ComposeInput{read, read, token, env, config.state});
        frame = std::move(composed.frame);
        result.moves = std::move(composed.moves);
      }
      if (rule.op.kind == StackOpKind::kPush) frame.origin_state = config.state;
      op.frame = std::move(frame);
      result.config = ExecStackOp(config, op);
      break;
    }
    case StackOpKind::kNone:
      result.config = config;
      break;
    default: {
      result.config = ExecStackOp(config, op);
      if (rule.compose) {
        ContextFrame base = result.config.top();
        ComposeResult composed =
            rule.compose(ComposeInput{read, base, token, env, config.state});
        result.config.stack.back() = std::move(composed.frame);
        result.moves = std::move(composed.moves);
      }
    }
  }
  result.config.state = rule.to;
  result.config.history.push_back({rule.to, result.config.top()});
  if (rule.emit) result.moves.push_back(env.Render(*rule.emit, result.config.top()));
  return result;
}

void Quiesce(const Machine& machine, RunResult& result, Environment& env,
             Rng& rng, std::size_t token_index) {
  for (int taken = 0;; ++taken) {
    if (Passing(machine, result.config, std::nullopt).empty()) return;
    if (taken == kEpsilonBudget) {
      result.trace.push_back(RunError{
          ErrorKind::kEpsilonBudget,
          "more than " + std::to_string(kEpsilonBudget) +
              " epsilon transitions from " + result.config.state,
          token_index});
      return;
    }
    try {
      StepResult step = Step(machine, result.config, nullptr, env, rng);
      result.config = std::move(step.config);
      for (auto& move : step.moves) result.trace.push_back(std::move(move));
    } catch (const Error& e) {
      result.trace.push_back(RunError{e.kind(), e.what(), token_index});
      return;
    }
  }
}

RunResult Run(const Machine& machine, Configuration config,
              const std::vector<InputToken>& tokens, Environment& env,
              Rng& rng) {
  RunResult result{std::move(config), {}};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    try {
      StepResult step = Step(machine, result.config, &tokens[i], env, rng);
      result.config = std::move(step.config);
      for (auto& move : step.moves) result.trace.push_back(std::move(move));
    } catch (const Error& e) {
      result.trace.push_back(RunError{e.kind(), e.what(), i});
      continue;
    }
    Quiesce(machine, result, env, rng, i);
  }
  return result;
}

std::set<std::string> EpsilonClosure(const Machine& machine,
                                     std::set<std::string> states) {
  std::deque<std::string> queue(states.begin(), states.end());
  while (!queue.empty()) {
    std::string state = std::move(queue.front());
    queue.pop_front();
    for (const TransitionRule* rule : machine.RulesFor(state, std::nullopt)) {
      if (states.insert(rule->to).second) queue.push_back(rule->to);
    }
  }
  return states;
}

std::set<std::string> Successors(const Machine& machine,
                                 const std::set<std::string>& states,
                                 Terminal input) {
  std::set<std::string> next;
  for (const auto& state : states) {
    for (const TransitionRule* rule : machine.RulesFor(state, input)) {
      next.insert(rule->to);
    }
  }
  return EpsilonClosure(machine, std::move(next));
}

AgentMove NullEnvironment::Render(const MoveTemplate& emit,
                                  const ContextFrame& top) {
  AgentMove move{emit.kind, emit.key, std::nullopt, std::nullopt};
  if (emit.kind == MoveKind::kQuestion && !top.candidates.empty()) {
    move.named_candidate = top.candidates.front();
  }
  return move;
}

namespace {

constexpr std::string_view kWhat = "machine";

StackOpSpec ParseOp(const std::string& text, const std::string& field) {
  if (text == "none") return {StackOpKind::kNone, {}};
  if (text == "push") return {StackOpKind::kPush, {}};
  if (text == "pop") return {StackOpKind::kPop, {}};
  if (text == "rewrite") return {StackOpKind::kRewrite, {}};
  if (text == "flush") return {StackOpKind::kFlush, {}};
  const std::string prefix = "popuntil:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
    return {StackOpKind::kPopUntil, text.substr(prefix.size())};
  }
  json_util::Fail(kWhat, field,
                  "expected none, push, pop, rewrite, flush or popuntil:STATE");
}

}  // namespace

Machine LoadMachine(std::string_view json_text,
                    const ComposeRegistry& registry) {
  using json_util::json;
  json doc = json_util::Parse(json_text, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  json_util::RejectUnknown(doc, {"start", "states", "transitions"}, kWhat, "");
  if (!doc.contains("start")) json_util::Fail(kWhat, "start", "required");
  if (!doc.contains("states") || !doc["states"].is_array()) {
    json_util::Fail(kWhat, "states", "expected a list");
  }
  std::vector<std::string> states;
  for (const auto& s : doc["states"]) {
    states.push_back(json_util::String(s, kWhat, "states"));
  }
  std::vector<TransitionRule> rules;
  const json transitions = doc.value("transitions", json::array());
  if (!transitions.is_array()) {
    json_util::Fail(kWhat, "transitions", "expected a list");
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string field = "transitions[" + std::to_string(i) + "]";
    const json& t = transitions[i];
    json_util::RequireObject(t, kWhat, field);
    json_util::RejectUnknown(
        t, {"from", "input", "guard", "weight", "op", "to", "emit", "compose"},
        kWhat, field);
    if (!t.contains("from") || !t.contains("to")) {
      json_util::Fail(kWhat, field, "needs from and to");
    }
    TransitionRule rule;
    rule.from = json_util::String(t["from"], kWhat, field + ".from");
    rule.to = json_util::String(t["to"], kWhat, field + ".to");
    if (t.contains("input") && !t["input"].is_null()) {
      std::string input = json_util::String(t["input"], kWhat, field + ".input");
      if (input != "ε" && input != "eps" && input != "epsilon") {
        rule.input = ParseTerminal(input);
        if (!rule.input) {
          json_util::Fail(kWhat, field + ".input", "unknown terminal '" + input + "'");
        }
      }
    }
    if (t.contains("guard")) {
      rule.guard = Guard::Parse(json_util::String(t["guard"], kWhat, field + ".guard"));
    }
    if (t.contains("weight")) {
      rule.weight = json_util::Number(t["weight"], kWhat, field + ".weight");
    }
    if (t.contains("op")) {
      rule.op = ParseOp(json_util::String(t["op"], kWhat, field + ".op"),
                        field + ".op");
    }
    if (t.contains("emit")) {
      std::string emit = json_util::String(t["emit"], kWhat, field + ".emit");
      std::string kind = emit.substr(0, emit.find(':'));
      auto parsed = ParseMoveKind(kind);
      if (!parsed) json_util::Fail(kWhat, field + ".emit", "unknown move kind");
      rule.emit = MoveTemplate{
          *parsed, emit.find(':') == std::string::npos
                       ? std::string()
                       : emit.substr(emit.find(':') + 1)};
    }
    if (t.contains("compose")) {
      rule.compose_name =
          json_util::String(t["compose"], kWhat, field + ".compose");
      auto fn = registry.find(rule.compose_name);
      if (fn == registry.end()) {
        json_util::Fail(kWhat, field + ".compose",
                        "unknown compose function '" + rule.compose_name + "'");
      }
      rule.compose = fn->second;
    }
    rules.push_back(std::move(rule));
  }
  return Machine(std::move(states),
                 json_util::String(doc["start"], kWhat, "start"),
                 std::move(rules));
}

Machine LoadMachineFile(const std::string& path,
                        const ComposeRegistry& registry) {
  return LoadMachine(json_util::ReadFile(path), registry);
}

}  // namespace ensemble::automaton
