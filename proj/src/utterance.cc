#include "ensemble/utterance.h"

#include <cctype>
#include <sstream>

#include "ensemble/error.h"

namespace ensemble {

namespace {

using Words = std::vector<std::string>;

[[noreturn]] void Unknown(const std::string& message) {
  throw Error(ErrorKind::kUnknownInput, message);
}

bool IsClauseBreak(char c) {
  return c == '.' || c == ',' || c == ';' || c == '!' || c == '?';
}

std::vector<Words> SplitClauses(std::string_view text) {
  std::vector<Words> clauses;
  Words current;
  std::string word;
  auto end_word = [&] {
    if (!word.empty()) current.push_back(std::move(word));
    word.clear();
  };
  auto end_clause = [&] {
    end_word();
    if (!current.empty()) clauses.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (IsClauseBreak(c)) {
      end_clause();
    } else if (std::isalnum(u) || c == '-' || c == '\'' || u >= 0x80) {
      word += static_cast<char>(std::tolower(u));
    } else if (std::isspace(u)) {
      end_word();
    } else {
      end_word();  // other punctuation is dropped
    }
  }
  end_clause();
  return clauses;
}

// Longest entry of 'table' whose words start at words[i]; returns the key
// and advances i.
template <typename Table>
const std::string* MatchLongest(const Table& table, const Words& words,
                                std::size_t& i) {
  const std::string* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& entry : table) {
    const std::string& key = [&]() -> const std::string& {
      if constexpr (std::is_same_v<std::decay_t<decltype(entry)>, std::string>) {
        return entry;
      } else {
        return entry.first;
      }
    }();
    std::istringstream parts(key);
    std::string part;
    std::size_t j = i;
    bool ok = true;
    while (parts >> part) {
      if (j >= words.size() || words[j] != part) {
        ok = false;
        break;
      }
      ++j;
    }
    if (ok && j - i > best_len) {
      best = &key;
      best_len = j - i;
    }
  }
  if (best != nullptr) i += best_len;
  return best;
}

class ClauseParser {
 public:
  ClauseParser(const Words& words, const Lexicon& lexicon)
      : words_(words), lexicon_(lexicon) {}

  std::pair<Terminal, Phrase> Parse() {
    if (words_.size() == 1 && lexicon_.affirmatives.count(words_[0])) {
      return {Terminal::kYes, Response{true}};
    }
    if (words_.size() == 1 && lexicon_.negatives.count(words_[0])) {
      return {Terminal::kNo, Response{false}};
    }
    std::size_t i = 0;
    if (const std::string* verb = MatchLongest(lexicon_.verbs, words_, i)) {
      pos_ = i;
      VerbPhrase vp = ParseVerbPhrase(lexicon_.verbs.at(*verb));
      Finish();
      return {Terminal::kVerb, std::move(vp)};
    }
    if (auto pp = TryPrepPhrase()) {
      Finish();
      return {Terminal::kPrep, std::move(*pp)};
    }
    if (auto np = TryNounPhrase()) {
      Finish();
      return {Terminal::kNoun, std::move(*np)};
    }
    Unknown("cannot interpret '" + Remaining() + "'");
  }

 private:
  bool AtEnd() const { return pos_ >= words_.size(); }

  std::string Remaining() const {
    std::string out;
    for (std::size_t i = pos_; i < words_.size(); ++i) {
      if (!out.empty()) out += ' ';
      out += words_[i];
    }
    return out;
  }

  void Finish() {
    if (!AtEnd()) {
      const std::string& w = words_[pos_];
      if (!IsKnown(w)) Unknown("unknown word '" + w + "'");
      Unknown("unexpected '" + Remaining() + "'");
    }
  }

  bool IsKnown(const std::string& w) const {
    auto in_keys = [&](const auto& table) {
      for (const auto& entry : table) {
        std::istringstream parts(entry.first);
        std::string part;
        while (parts >> part) {
          if (part == w) return true;
        }
      }
      return false;
    };
    return lexicon_.nouns.count(w) || lexicon_.attributes.count(w) ||
           lexicon_.pronouns.count(w) || lexicon_.demonstratives.count(w) ||
           lexicon_.affirmatives.count(w) || lexicon_.negatives.count(w) ||
           in_keys(lexicon_.determiners) || in_keys(lexicon_.verbs) ||
           in_keys(lexicon_.prepositions) || in_keys(lexicon_.relative_regions);
  }

  // "the blue cup", "cup", "that"
  std::optional<NounPhrase> TryNounPhrase() {
    std::size_t i = pos_;
    NounPhrase np;
    if (i < words_.size()) {
      auto d = lexicon_.determiners.find(words_[i]);
      if (d != lexicon_.determiners.end()) {
        np.determiner = d->second;
        ++i;
      }
    }
    while (i < words_.size() && lexicon_.attributes.count(words_[i])) {
      np.attributes.insert(words_[i++]);
    }
    if (i < words_.size() && lexicon_.nouns.count(words_[i])) {
      np.noun = words_[i++];
    } else if (!(np.IsDeictic() && np.attributes.empty())) {
      return std::nullopt;
    }
    pos_ = i;
    return np;
  }

  std::optional<PrepPhrase> TryPrepPhrase() {
    std::size_t i = pos_;
    std::size_t j = pos_;
    const std::string* region =
        MatchLongest(lexicon_.relative_regions, words_, i);
    const std::string* prep = MatchLongest(lexicon_.prepositions, words_, j);
    if (region != nullptr && i >= j) {
      pos_ = i;
      const RegionEntry& entry = lexicon_.relative_regions.at(*region);
      return PrepPhrase{entry.relation,
                        RelativeRegion{entry.relation, entry.anchor}};
    }
    if (prep == nullptr) return std::nullopt;
    std::size_t saved = pos_;
    pos_ = j;
    auto np = TryNounPhrase();
    if (!np) {
      pos_ = saved;
      if (j < words_.size() && !IsKnown(words_[j])) {
        Unknown("unknown word '" + words_[j] + "'");
      }
      Unknown("preposition '" + *prep + "' needs an object");
    }
    return PrepPhrase{lexicon_.prepositions.at(*prep), std::move(*np)};
  }

  VerbPhrase ParseVerbPhrase(const VerbEntry& entry) {
    VerbPhrase vp;
    vp.lemma = entry.lemma;
    if (!AtEnd() && lexicon_.pronouns.count(words_[pos_])) {
      vp.theme = Pronoun{};
      ++pos_;
    } else if (!AtEnd() && !lexicon_.demonstratives.count(words_[pos_])) {
      if (auto np = TryNounPhrase()) vp.theme = std::move(*np);
    }
    if (vp.theme && !entry.takes_theme) {
      Unknown("'" + vp.lemma + "' takes no object");
    }
    if (AtEnd()) return vp;
    if (lexicon_.demonstratives.count(words_[pos_])) {
      vp.destination = Demonstrative{words_[pos_++]};
    } else if (auto pp = TryPrepPhrase()) {
      vp.destination = std::move(*pp);
    } else {
      return vp;  // Finish reports the leftovers
    }
    if (!entry.takes_destination) {
      Unknown("'" + vp.lemma + "' takes no destination");
    }
    return vp;
  }

  const Words& words_;
  const Lexicon& lexicon_;
  std::size_t pos_ = 0;
};

}  // namespace

ParsedUtterance ParseUtterance(std::string_view text, const Lexicon& lexicon) {
  ParsedUtterance parsed;
  for (const Words& clause : SplitClauses(text)) {
    auto [terminal, phrase] = ClauseParser(clause, lexicon).Parse();
    parsed.terminals.push_back(terminal);
    parsed.content.push_back(std::move(phrase));
  }
  if (parsed.terminals.empty()) Unknown("empty utterance");
  return parsed;
}

std::vector<InputToken> ClassifyEvent(const InputEvent& event,
                                      const Lexicon& lexicon) {
  std::vector<InputToken> tokens;
  if (const auto* speech = std::get_if<Utterance>(&event.payload)) {
    ParsedUtterance parsed = ParseUtterance(speech->text, lexicon);
    for (std::size_t i = 0; i < parsed.terminals.size(); ++i) {
      TokenContent content = std::visit(
          [](auto&& p) -> TokenContent { return p; }, parsed.content[i]);
      tokens.push_back({parsed.terminals[i], std::move(content), event.time});
    }
    return tokens;
  }
  const Gesture& gesture = std::get<Gesture>(event.payload);
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, DeixisGesture>) {
          tokens.push_back({Terminal::kDeixis, g, event.time});
        } else if constexpr (std::is_same_v<G, StaticIconicGesture>) {
          tokens.push_back({Terminal::kStaticIconic, g, event.time});
        } else if constexpr (std::is_same_v<G, DynamicIconicGesture>) {
          tokens.push_back({Terminal::kDynamicIconic, g, event.time});
        } else {
          tokens.push_back({g.positive ? Terminal::kYes : Terminal::kNo,
                            Response{g.positive}, event.time});
        }
      },
      gesture);
  return tokens;
}

void Validate(const InputEvent& event) {
  const auto* gesture = std::get_if<Gesture>(&event.payload);
  if (gesture == nullptr) return;
  if (const auto* d = std::get_if<DeixisGesture>(gesture)) {
    if (!d->origin.IsFinite() || !d->direction.IsFinite() ||
        d->direction.Norm() == 0.0) {
      throw Error(ErrorKind::kValidation,
                  "deixis needs a finite origin and a non-zero direction");
    }
  }
}

namespace {

std::string FormatNoun(const NounPhrase& np) {
  std::string out;
  switch (np.determiner) {
    case Determiner::kDefinite: out = "the"; break;
    case Determiner::kIndefinite: out = "a"; break;
    case Determiner::kDemonstrative: out = "that"; break;
    case Determiner::kNone: break;
  }
  for (const auto& a : np.attributes) out += (out.empty() ? "" : " ") + a;
  if (!np.noun.empty()) out += (out.empty() ? "" : " ") + np.noun;
  return out;
}

std::string FormatPrep(const PrepPhrase& pp) {
  if (const auto* r = std::get_if<RelativeRegion>(&pp.object)) {
    return r->relation + "(" + r->anchor + ")";
  }
  return pp.relation + "(" + FormatNoun(std::get<NounPhrase>(pp.object)) + ")";
}

}  // namespace

std::string FormatPhrase(const Phrase& phrase) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NounPhrase>) {
          return "N[" + FormatNoun(p) + "]";
        } else if constexpr (std::is_same_v<P, PrepPhrase>) {
          return "P[" + FormatPrep(p) + "]";
        } else if constexpr (std::is_same_v<P, Response>) {
          return p.affirmative ? "y" : "n";
        } else {
          std::string out = "V[" + p.lemma;
          if (p.theme) {
            out += ", ";
            if (const auto* np = std::get_if<NounPhrase>(&*p.theme)) {
              out += FormatNoun(*np);
            } else {
              out += "it";
            }
          }
          if (p.destination) {
            out += ", ";
            if (const auto* pp = std::get_if<PrepPhrase>(&*p.destination)) {
              out += FormatPrep(*pp);
            } else {
              out += std::get<Demonstrative>(*p.destination).word;
            }
          }
          return out + "]";
        }
      },
      phrase);
}

}  // namespace ensemble
