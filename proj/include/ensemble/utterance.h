#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ensemble/events.h"
#include "ensemble/lexicon.h"
#include "ensemble/terminal.h"

namespace ensemble {

struct NounPhrase {
  std::string noun;  // empty for a bare demonstrative ("that")
  std::set<std::string> attributes;
  Determiner determiner = Determiner::kNone;

  bool IsDeictic() const { return determiner == Determiner::kDemonstrative; }
  friend bool operator==(const NounPhrase&, const NounPhrase&) = default;
};

struct RelativeRegion {
  std::string relation;  // "front_of"
  std::string anchor;    // "agent"
  friend bool operator==(const RelativeRegion&,
                         const RelativeRegion&) = default;
};

struct PrepPhrase {
  std::string relation;  // "in", "on", ... or the region relation
  std::variant<NounPhrase, RelativeRegion> object;
  friend bool operator==(const PrepPhrase&, const PrepPhrase&) = default;
};

struct Pronoun {
  friend bool operator==(const Pronoun&, const Pronoun&) = default;
};

struct Demonstrative {
  std::string word;  // "there" / "here"
  friend bool operator==(const Demonstrative&, const Demonstrative&) = default;
};

using Theme = std::variant<NounPhrase, Pronoun>;
using Destination = std::variant<PrepPhrase, Demonstrative>;

struct VerbPhrase {
  std::string lemma;
  std::optional<Theme> theme;
  std::optional<Destination> destination;
  friend bool operator==(const VerbPhrase&, const VerbPhrase&) = default;
};

struct Response {
  bool affirmative = true;
  friend bool operator==(const Response&, const Response&) = default;
};

using Phrase = std::variant<NounPhrase, VerbPhrase, PrepPhrase, Response>;

struct ParsedUtterance {
  std::vector<Terminal> terminals;
  std::vector<Phrase> content;  // aligned 1:1 with terminals
};

// Parses the closed utterance grammar. Sentences and clauses (split on . , ;
// ! ?) become separate terminals, in order. Throws Error(kUnknownInput) on
// out-of-vocabulary words or structures outside the grammar.
ParsedUtterance ParseUtterance(std::string_view text,
                               const Lexicon& lexicon = Lexicon::Default());

using TokenContent =
    std::variant<NounPhrase, VerbPhrase, PrepPhrase, Response, DeixisGesture,
                 StaticIconicGesture, DynamicIconicGesture>;

// A classified input: one terminal plus the content it carries.
struct InputToken {
  Terminal terminal;
  TokenContent content;
  std::uint64_t time = 0;
};

// Maps an event onto terminals. Gestures always yield exactly one token;
// speech yields the terminals of ParseUtterance.
std::vector<InputToken> ClassifyEvent(
    const InputEvent& event, const Lexicon& lexicon = Lexicon::Default());

std::string FormatPhrase(const Phrase& phrase);

}  // namespace ensemble
