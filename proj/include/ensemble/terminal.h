#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ensemble {

// The terminal alphabet of the interactive grammar. Each multimodal move is
// classified into one of these.
enum class Terminal : std::uint8_t {
  kDeixis,         // δ  deictic gesture
  kStaticIconic,   // ω  static iconic gesture (object)
  kDynamicIconic,  // α  dynamic iconic gesture (action)
  kYes,            // y  affirmative response
  kNo,             // n  negative response
  kNoun,           // N  noun phrase
  kVerb,           // V  verb phrase
  kPrep,           // P  prepositional phrase
};

inline constexpr std::size_t kTerminalCount = 8;

inline constexpr std::array<Terminal, kTerminalCount> kAllTerminals = {
    Terminal::kDeixis, Terminal::kStaticIconic, Terminal::kDynamicIconic,
    Terminal::kYes,    Terminal::kNo,           Terminal::kNoun,
    Terminal::kVerb,   Terminal::kPrep,
};

std::string_view TerminalSymbol(Terminal t);

// Accepts the symbol ("δ"), or the ASCII aliases "d"/"delta", "w"/"omega",
// "a"/"alpha".
std::optional<Terminal> ParseTerminal(std::string_view text);

std::string FormatSequence(const std::vector<Terminal>& sequence);

}  // namespace ensemble
