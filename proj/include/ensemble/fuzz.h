#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ensemble/dialogue.h"
#include "ensemble/scene.h"

namespace ensemble::fuzz {

struct FuzzOptions {
  int max_len = 6;
  int count = 1000;
  std::uint64_t seed = 0;
};

struct FuzzReport {
  int sequences = 0;
  int distinct_sequences = 0;
  int events = 0;
  int dead_input_errors = 0;
  int other_errors = 0;
  int invariant_violations = 0;
  std::map<std::string, int> moves_by_kind;
  std::string first_violation;
};

// Samples grammatical move sequences, realizes each terminal as a canonical
// event over 'scene' and runs it through a fresh session, checking stack and
// move invariants after every event.
FuzzReport Fuzz(const FuzzOptions& options, const scene::Scene& scene,
                const dialogue::Resources& resources =
                    dialogue::Resources::Default());

std::string FormatReport(const FuzzReport& report);

// Shipped scene used when no scene file is given.
const scene::Scene& DefaultScene();

}  // namespace ensemble::fuzz
