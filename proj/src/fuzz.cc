#include "ensemble/fuzz.h"

#include <set>

#include <fmt/format.h>

#include "ensemble/error.h"
#include "ensemble/grammar.h"
#include "ensemble/session.h"
#include "resources.h"

namespace ensemble::fuzz {

namespace {

constexpr std::string_view kShape = "fuzz-grasp";

struct Canon {
  std::string noun;
  std::string other_noun;
  Vec3 point_at;
};

InputEvent Realize(Terminal t, const Canon& c, const scene::Scene& scene) {
  InputEvent e;
  switch (t) {
    case Terminal::kDeixis:
      e.payload = Gesture{DeixisGesture{scene.human_viewpoint,
                                        c.point_at - scene.human_viewpoint}};
      break;
    case Terminal::kStaticIconic:
      e.payload = Gesture{StaticIconicGesture{std::string(kShape)}};
      break;
    case Terminal::kDynamicIconic:
      e.payload = Gesture{DynamicIconicGesture{"lift"}};
      break;
    case Terminal::kYes: e.payload = Utterance{"yes"}; break;
    case Terminal::kNo: e.payload = Utterance{"no"}; break;
    case Terminal::kNoun: e.payload = Utterance{"the " + c.noun}; break;
    case Terminal::kVerb: e.payload = Utterance{"put it there"}; break;
    case Terminal::kPrep: e.payload = Utterance{"on the " + c.other_noun}; break;
  }
  return e;
}

// Checks what must hold between events; returns a description or "".
std::string CheckInvariants(const Session& session, const Turn& turn) {
  const auto& config = session.configuration();
  if (config.stack.empty()) return "empty stack";
  if (config.state == "Route" || config.state == "Execute") {
    return "stopped in transient state " + config.state;
  }
  std::set<std::string> held;
  for (const auto& o : session.scene().objects) {
    if (o.held_by && *o.held_by == "agent") held.insert(o.id);
  }
  if (config.top().held != held) return "held set disagrees with the scene";
  for (const auto& move : turn.moves) {
    if (move.kind == MoveKind::kAction &&
        (!move.action_record || !semantics::IsSaturated(*move.action_record))) {
      return "action without a saturated record";
    }
    if (move.kind == MoveKind::kQuestion && !move.named_candidate) {
      return "question without a candidate";
    }
  }
  return "";
}

}  // namespace

const scene::Scene& DefaultScene() {
  static const scene::Scene scene = scene::LoadScene(resources::kKitchenScene);
  return scene;
}

FuzzReport Fuzz(const FuzzOptions& options, const scene::Scene& scene,
                const dialogue::Resources& resources) {
  if (scene.objects.empty()) throw Error(ErrorKind::kValidation, "scene has no objects");
  auto sequences = grammar::Generate(options.max_len, options.count, options.seed);

  Canon canon;
  canon.noun = scene.objects.front().kind;
  canon.other_noun = scene.objects.back().kind;
  canon.point_at = scene.objects.front().position;
  std::string graspable;
  for (const auto& o : scene.objects) {
    if (o.graspable) {
      graspable = o.id;
      break;
    }
  }

  FuzzReport report;
  std::set<std::vector<Terminal>> distinct;
  for (const auto& sequence : sequences) {
    ++report.sequences;
    distinct.insert(sequence);
    Session session(scene, resources);
    if (!graspable.empty()) {
      session.gestures().Bind({std::string(kShape),
                               semantics::Predicate("grasp", {semantics::EntityRef{graspable}}),
                               std::string(kShape), 0});
    }
    for (Terminal t : sequence) {
      ++report.events;
      InputEvent event = Realize(t, canon, session.scene());
      event.time = session.NextTime();
      Turn turn = session.Handle(event);
      for (const auto& error : turn.errors) {
        if (error.kind == ErrorKind::kDeadInput) {
          ++report.dead_input_errors;
        } else {
          ++report.other_errors;
        }
      }
      for (const auto& move : turn.moves) ++report.moves_by_kind[std::string(MoveKindName(move.kind))];
      std::string violation = CheckInvariants(session, turn);
      if (!violation.empty()) {
        if (report.invariant_violations == 0) {
          report.first_violation = FormatSequence(sequence) + ": " + violation;
        }
        ++report.invariant_violations;
      }
    }
  }
  report.distinct_sequences = static_cast<int>(distinct.size());
  return report;
}

std::string FormatReport(const FuzzReport& r) {
  std::string out = fmt::format(
      "sequences: {}\ndistinct: {}\nevents: {}\ndead_input_errors: {}\n"
      "other_errors: {}\ninvariant_violations: {}\n",
      r.sequences, r.distinct_sequences, r.events, r.dead_input_errors, r.other_errors,
      r.invariant_violations);
  for (const auto& [kind, n] : r.moves_by_kind) out += fmt::format("moves.{}: {}\n", kind, n);
  if (!r.first_violation.empty()) out += "first_violation: " + r.first_violation + "\n";
  return out;
}

}  // namespace ensemble::fuzz
