#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ensemble/agent_move.h"
#include "ensemble/session.h"
#include "ensemble/wire.h"

namespace ensemble::trace {

// An optional annotation of the move the agent is expected to make.
// Absent fields are not compared.
struct ExpectedMove {
  MoveKind kind = MoveKind::kAck;
  std::optional<std::string> text;
  std::optional<std::string> action_record;
  std::optional<std::string> named_candidate;
};

struct TraceRecord {
  std::size_t line = 0;
  std::variant<wire::ClientMessage, ExpectedMove> item;
};

// Line-delimited JSON; blank lines and lines starting with '#' are skipped.
// Throws Error(kSchema) naming the line.
std::vector<TraceRecord> ParseTrace(std::string_view text);
std::vector<TraceRecord> LoadTraceFile(const std::string& path);

// Whitespace-normalized text, structural action records.
bool Matches(const ExpectedMove& expected, const AgentMove& actual,
             const scene::Scene& scene);

struct ReplayResult {
  std::vector<AgentMove> moves;
  std::size_t confusions = 0;
  std::size_t errors = 0;
  std::vector<std::string> mismatches;
  int exit_code = 0;
};

// Replays the human records, writing one JSON line per human event and agent
// move to 'log'. Exit code 0 iff no confusion moves or engine errors and
// every expectation matched (expectations are matched in order against the
// full move sequence).
ReplayResult Replay(Session& session, const std::vector<TraceRecord>& records,
                    std::ostream& log);

}  // namespace ensemble::trace
