#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ensemble {

enum class Determiner { kNone, kDefinite, kIndefinite, kDemonstrative };

struct VerbEntry {
  std::string lemma;               // predicate name in the action table
  bool takes_theme = true;
  bool takes_destination = false;
};

struct RegionEntry {
  std::string relation;  // e.g. "front_of"
  std::string anchor;    // e.g. "agent"
};

// The closed utterance vocabulary. Multi-word entries ("pick up",
// "in front of you") are matched greedily, longest first.
struct Lexicon {
  std::set<std::string> nouns;
  std::set<std::string> attributes;
  std::map<std::string, Determiner> determiners;
  std::map<std::string, VerbEntry> verbs;
  std::map<std::string, std::string> prepositions;  // surface -> relation
  std::map<std::string, RegionEntry> relative_regions;
  std::set<std::string> pronouns;
  std::set<std::string> demonstratives;  // "there", "here"
  std::set<std::string> affirmatives;
  std::set<std::string> negatives;
  std::map<std::string, std::string> motions;  // motion_id -> verb lemma

  // Shipped default vocabulary.
  static const Lexicon& Default();
};

// Throws Error(kSchema) on malformed documents or unknown fields.
Lexicon LoadLexicon(std::string_view json_text);
Lexicon LoadLexiconFile(const std::string& path);

}  // namespace ensemble
