#include "ensemble/lexicon.h"

#include "json_util.h"
#include "resources.h"

namespace ensemble {

namespace {

constexpr std::string_view kWhat = "lexicon";

using json_util::json;

std::string Lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::set<std::string> Words(const json& doc, const std::string& field) {
  std::set<std::string> words;
  if (!doc.contains(field)) return words;
  const json& list = doc[field];
  if (!list.is_array()) json_util::Fail(kWhat, field, "expected a list");
  for (const auto& w : list) words.insert(Lower(json_util::String(w, kWhat, field)));
  return words;
}

const json& Map(const json& doc, const std::string& field) {
  static const json empty = json::object();
  if (!doc.contains(field)) return empty;
  json_util::RequireObject(doc[field], kWhat, field);
  return doc[field];
}

Determiner ParseDeterminer(const std::string& s, const std::string& field) {
  if (s == "definite") return Determiner::kDefinite;
  if (s == "indefinite") return Determiner::kIndefinite;
  if (s == "demonstrative") return Determiner::kDemonstrative;
  json_util::Fail(kWhat, field,
                  "expected definite, indefinite or demonstrative");
}

}  // namespace

Lexicon LoadLexicon(std::string_view json_text) {
  json doc = json_util::Parse(json_text, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  json_util::RejectUnknown(
      doc,
      {"nouns", "attributes", "determiners", "verbs", "prepositions",
       "relative_regions", "pronouns", "demonstratives", "affirmatives",
       "negatives", "motions"},
      kWhat, "");
  Lexicon lexicon;
  lexicon.nouns = Words(doc, "nouns");
  lexicon.attributes = Words(doc, "attributes");
  lexicon.pronouns = Words(doc, "pronouns");
  lexicon.demonstratives = Words(doc, "demonstratives");
  lexicon.affirmatives = Words(doc, "affirmatives");
  lexicon.negatives = Words(doc, "negatives");

  for (const auto& [word, value] : Map(doc, "determiners").items()) {
    std::string field = "determiners." + word;
    lexicon.determiners[Lower(word)] =
        ParseDeterminer(json_util::String(value, kWhat, field), field);
  }
  for (const auto& [word, value] : Map(doc, "verbs").items()) {
    std::string field = "verbs." + word;
    json_util::RequireObject(value, kWhat, field);
    json_util::RejectUnknown(value, {"lemma", "theme", "destination"}, kWhat,
                             field);
    VerbEntry entry;
    entry.lemma = value.contains("lemma")
                      ? json_util::String(value["lemma"], kWhat, field + ".lemma")
                      : Lower(word);
    if (value.contains("theme")) {
      entry.takes_theme = json_util::Boolean(value["theme"], kWhat, field + ".theme");
    }
    if (value.contains("destination")) {
      entry.takes_destination =
          json_util::Boolean(value["destination"], kWhat, field + ".destination");
    }
    lexicon.verbs[Lower(word)] = entry;
  }
  for (const auto& [word, value] : Map(doc, "prepositions").items()) {
    lexicon.prepositions[Lower(word)] =
        json_util::String(value, kWhat, "prepositions." + word);
  }
  for (const auto& [phrase, value] : Map(doc, "relative_regions").items()) {
    std::string field = "relative_regions." + phrase;
    json_util::RequireObject(value, kWhat, field);
    json_util::RejectUnknown(value, {"relation", "anchor"}, kWhat, field);
    if (!value.contains("relation") || !value.contains("anchor")) {
      json_util::Fail(kWhat, field, "needs relation and anchor");
    }
    lexicon.relative_regions[Lower(phrase)] = {
        json_util::String(value["relation"], kWhat, field + ".relation"),
        json_util::String(value["anchor"], kWhat, field + ".anchor")};
  }
  for (const auto& [motion, value] : Map(doc, "motions").items()) {
    lexicon.motions[motion] = json_util::String(value, kWhat, "motions." + motion);
  }
  return lexicon;
}

Lexicon LoadLexiconFile(const std::string& path) {
  return LoadLexicon(json_util::ReadFile(path));
}

const Lexicon& Lexicon::Default() {
  static const Lexicon lexicon = LoadLexicon(resources::kLexicon);
  return lexicon;
}

}  // namespace ensemble
