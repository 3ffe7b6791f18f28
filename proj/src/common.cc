#include <cstdio>
#include <cstdlib>
#include <string>

#include "ensemble/agent_move.h"
#include "ensemble/error.h"
#include "ensemble/geometry.h"
#include "ensemble/terminal.h"

namespace ensemble {

namespace {

std::string FormatNumber(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::string FormatVec3(const Vec3& v) {
  return "(" + FormatNumber(v.x) + "," + FormatNumber(v.y) + "," +
         FormatNumber(v.z) + ")";
}

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kNoTarget: return "no-target";
    case ErrorKind::kUnknownInput: return "unknown-input";
    case ErrorKind::kGrammar: return "grammar";
    case ErrorKind::kComposition: return "composition";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kRaising: return "raising";
    case ErrorKind::kPreconditionMismatch: return "precondition-mismatch";
    case ErrorKind::kDeadInput: return "dead-input";
    case ErrorKind::kStackUnderflow: return "stack-underflow";
    case ErrorKind::kEpsilonBudget: return "epsilon-budget-exhausted";
    case ErrorKind::kMode: return "mode";
    case ErrorKind::kRebind: return "rebind";
    case ErrorKind::kIncompleteDemonstration: return "incomplete-demonstration";
    case ErrorKind::kUnknownGesture: return "unknown-gesture";
    case ErrorKind::kInternal: return "internal";
  }
  return "internal";
}

std::string_view TerminalSymbol(Terminal t) {
  switch (t) {
    case Terminal::kDeixis: return "δ";
    case Terminal::kStaticIconic: return "ω";
    case Terminal::kDynamicIconic: return "α";
    case Terminal::kYes: return "y";
    case Terminal::kNo: return "n";
    case Terminal::kNoun: return "N";
    case Terminal::kVerb: return "V";
    case Terminal::kPrep: return "P";
  }
  return "?";
}

std::optional<Terminal> ParseTerminal(std::string_view text) {
  for (Terminal t : kAllTerminals) {
    if (text == TerminalSymbol(t)) return t;
  }
  if (text == "d" || text == "delta") return Terminal::kDeixis;
  if (text == "w" || text == "omega") return Terminal::kStaticIconic;
  if (text == "a" || text == "alpha") return Terminal::kDynamicIconic;
  return std::nullopt;
}

std::string FormatSequence(const std::vector<Terminal>& sequence) {
  std::string out;
  for (Terminal t : sequence) {
    if (!out.empty()) out += ' ';
    out += TerminalSymbol(t);
  }
  return out;
}

std::string_view MoveKindName(MoveKind kind) {
  switch (kind) {
    case MoveKind::kAck: return "ack";
    case MoveKind::kQuestion: return "question";
    case MoveKind::kAction: return "action";
    case MoveKind::kConfusion: return "confusion";
  }
  return "ack";
}

std::optional<MoveKind> ParseMoveKind(std::string_view name) {
  for (MoveKind k : {MoveKind::kAck, MoveKind::kQuestion, MoveKind::kAction,
                     MoveKind::kConfusion}) {
    if (MoveKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string ToString(const AgentMove& move) {
  std::string out = std::string(MoveKindName(move.kind)) + ": " + move.text;
  if (move.action_record) out += " [" + semantics::ToString(*move.action_record) + "]";
  if (move.named_candidate) out += " {" + semantics::ToString(*move.named_candidate) + "}";
  return out;
}

}  // namespace ensemble
