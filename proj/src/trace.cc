#include "ensemble/trace.h"

#include <ostream>
#include <sstream>

#include "ensemble/error.h"
#include "ensemble/serialize.h"
#include "json_util.h"

namespace ensemble::trace {

using nlohmann::json;

namespace {

std::string NormalizeSpace(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

ExpectedMove ParseExpected(const json& j) {
  ExpectedMove e;
  for (const auto& [key, value] : j.items()) {
    if (key != "type" && key != "kind" && key != "text" && key != "action_record" &&
        key != "named_candidate") {
      throw Error(ErrorKind::kSchema, "expect has unknown field '" + key + "'");
    }
  }
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) {
      throw Error(ErrorKind::kSchema, std::string("expect.") + key + " must be a string");
    }
    return j[key].get<std::string>();
  };
  auto kind = str("kind");
  if (!kind) throw Error(ErrorKind::kSchema, "expect needs 'kind'");
  auto parsed = ParseMoveKind(*kind);
  if (!parsed) throw Error(ErrorKind::kSchema, "unknown move kind '" + *kind + "'");
  e.kind = *parsed;
  e.text = str("text");
  e.action_record = str("action_record");
  e.named_candidate = str("named_candidate");
  return e;
}

}  // namespace

std::vector<TraceRecord> ParseTrace(std::string_view text) {
  std::vector<TraceRecord> records;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = NormalizeSpace(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    try {
      json j = json::parse(line);
      if (j.is_object() && j.value("type", "") == "expect") {
        records.push_back({line_no, ParseExpected(j)});
      } else {
        records.push_back({line_no, wire::ParseClientMessage(j)});
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kSchema,
                  "trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorKind::kSchema,
                  "trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<TraceRecord> LoadTraceFile(const std::string& path) {
  return ParseTrace(json_util::ReadFile(path));
}

bool Matches(const ExpectedMove& expected, const AgentMove& actual,
             const scene::Scene&) {
  if (expected.kind != actual.kind) return false;
  if (expected.text && NormalizeSpace(*expected.text) != NormalizeSpace(actual.text)) {
    return false;
  }
  if (expected.action_record) {
    if (!actual.action_record ||
        !semantics::MatchesRecord(*expected.action_record, *actual.action_record)) {
      return false;
    }
  }
  if (expected.named_candidate) {
    if (!actual.named_candidate) return false;
    // Wrap the term so the record matcher can compare it.
    semantics::SemanticForm wrapper;
    wrapper.head = "c";
    wrapper.args = {*actual.named_candidate};
    if (!semantics::MatchesRecord("c(" + *expected.named_candidate + ")", wrapper)) {
      return false;
    }
  }
  return true;
}

ReplayResult Replay(Session& session, const std::vector<TraceRecord>& records,
                    std::ostream& log) {
  ReplayResult result;
  std::size_t cursor = 0;
  for (const TraceRecord& record : records) {
    if (const auto* expected = std::get_if<ExpectedMove>(&record.item)) {
      if (cursor >= result.moves.size()) {
        result.mismatches.push_back("line " + std::to_string(record.line) +
                                    ": expected a " +
                                    std::string(MoveKindName(expected->kind)) +
                                    " move, got nothing");
      } else if (!Matches(*expected, result.moves[cursor], session.scene())) {
        result.mismatches.push_back("line " + std::to_string(record.line) +
                                    ": got " + ToString(result.moves[cursor]));
      }
      ++cursor;
      continue;
    }
    const auto& message = std::get<wire::ClientMessage>(record.item);
    std::uint64_t time = session.NextTime();
    cursor = result.moves.size();
    json human{{"direction", "human"}, {"time", time}, {"event", wire::ToJson(message)}};
    std::vector<AgentMove> moves;
    if (const auto* learn = std::get_if<wire::LearnGestureMessage>(&message.body)) {
      try {
        auto entry = session.LearnGesture(learn->shape_id);
        human["learned"] = semantics::ToString(entry.bound_form);
      } catch (const Error& e) {
        ++result.errors;
        human["error"] = e.what();
      }
    } else if (std::holds_alternative<wire::ResetMessage>(message.body)) {
      session.Reset();
    } else {
      InputEvent event = *wire::ToInputEvent(message, session.scene(), time);
      Turn turn = session.Handle(event);
      moves = std::move(turn.moves);
      result.errors += turn.errors.size();
    }
    human["digest"] = Digest(session.configuration());
    log << human.dump() << '\n';
    for (auto& move : moves) {
      if (move.kind == MoveKind::kConfusion) ++result.confusions;
      json agent{{"direction", "agent"}, {"move", ToJson(move)}};
      log << agent.dump() << '\n';
      result.moves.push_back(std::move(move));
    }
  }
  result.exit_code =
      result.confusions == 0 && result.errors == 0 && result.mismatches.empty() ? 0 : 1;
  return result;
}

}  // namespace ensemble::trace
