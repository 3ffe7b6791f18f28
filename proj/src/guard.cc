#include "ensemble/guard.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "ensemble/error.h"

namespace ensemble::automaton {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Bad(std::string_view text, const std::string& why) {
  throw Error(ErrorKind::kSchema,
              "guard '" + std::string(text) + "': " + why);
}

const std::map<std::string_view, Feature>& BooleanFeatures() {
  static const std::map<std::string_view, Feature> features = {
      {"indicated", Feature::kIndicated}, {"pending", Feature::kPending},
      {"saturated", Feature::kSaturated}, {"hole_direct", Feature::kHoleDirect},
      {"focus", Feature::kFocus},         {"held", Feature::kHeld},
  };
  return features;
}

bool Compare(long lhs, Comparison op, long rhs) {
  switch (op) {
    case Comparison::kEq: return lhs == rhs;
    case Comparison::kNe: return lhs != rhs;
    case Comparison::kLt: return lhs < rhs;
    case Comparison::kLe: return lhs <= rhs;
    case Comparison::kGt: return lhs > rhs;
    case Comparison::kGe: return lhs >= rhs;
  }
  return false;
}

Atom ParseAtom(std::string_view whole, std::string_view text) {
  Atom atom;
  bool negated = false;
  if (!text.empty() && text.front() == '!') {
    negated = true;
    text = Trim(text.substr(1));
  }
  if (text.substr(0, 10) == "in_region(") {
    if (text.back() != ')') Bad(whole, "unterminated in_region");
    std::string args(text.substr(10, text.size() - 11));
    atom.feature = Feature::kInRegion;
    atom.truth = !negated;
    char* p = args.data();
    for (int i = 0; i < 3; ++i) {
      char* end = nullptr;
      atom.region[i] = std::strtod(p, &end);
      if (end == p) Bad(whole, "in_region needs x, z, radius");
      p = end;
      while (*p == ' ' || (i < 2 && *p == ',')) ++p;
    }
    if (*p != '\0') Bad(whole, "in_region needs exactly three numbers");
    return atom;
  }
  auto boolean = BooleanFeatures().find(text);
  if (boolean != BooleanFeatures().end()) {
    atom.feature = boolean->second;
    atom.truth = !negated;
    return atom;
  }
  if (negated) Bad(whole, "'!' applies only to boolean features");

  static const std::pair<std::string_view, Comparison> kOps[] = {
      {"==", Comparison::kEq}, {"!=", Comparison::kNe}, {"<=", Comparison::kLe},
      {">=", Comparison::kGe}, {"<", Comparison::kLt},  {">", Comparison::kGt},
  };
  for (const auto& [symbol, op] : kOps) {
    std::size_t at = text.find(symbol);
    if (at == std::string_view::npos) continue;
    std::string_view name = Trim(text.substr(0, at));
    std::string_view value = Trim(text.substr(at + symbol.size()));
    atom.op = op;
    if (name == "candidates") {
      atom.feature = Feature::kCandidates;
      std::string digits(value);
      char* end = nullptr;
      atom.number = std::strtol(digits.c_str(), &end, 10);
      if (digits.empty() || *end != '\0') Bad(whole, "expected a count");
      return atom;
    }
    if (name == "hole" || name == "origin") {
      if (op != Comparison::kEq && op != Comparison::kNe) {
        Bad(whole, std::string(name) + " supports only == and !=");
      }
      atom.feature = name == "hole" ? Feature::kHole : Feature::kOrigin;
      atom.label = std::string(value);
      if (atom.feature == Feature::kHole && atom.label != "none" &&
          atom.label != "entity" && atom.label != "location" &&
          atom.label != "truth") {
        Bad(whole, "hole is one of none, entity, location, truth");
      }
      if (atom.label.empty()) Bad(whole, "missing value");
      return atom;
    }
    Bad(whole, "unknown feature '" + std::string(name) + "'");
  }
  Bad(whole, "cannot parse '" + std::string(text) + "'");
}

bool BooleanValue(Feature feature, const ContextFrame& frame) {
  switch (feature) {
    case Feature::kIndicated: return frame.indicated.has_value();
    case Feature::kPending: return frame.pending_form.has_value();
    case Feature::kSaturated:
      return frame.pending_form && semantics::IsSaturated(*frame.pending_form);
    case Feature::kHoleDirect:
      return frame.pending_form &&
             semantics::OutermostHoleIsDirect(*frame.pending_form);
    case Feature::kFocus: return frame.focus.has_value();
    case Feature::kHeld: return !frame.held.empty();
    default: return false;
  }
}

}  // namespace

std::string HoleFeature(const ContextFrame& frame) {
  if (!frame.pending_form || frame.pending_form->holes.empty()) return "none";
  const semantics::SemType& type = frame.pending_form->holes.front().type;
  if (type.IsArrow()) return "truth";
  switch (type.base()) {
    case semantics::BaseType::kEntity: return "entity";
    case semantics::BaseType::kLocation: return "location";
    case semantics::BaseType::kTruth: return "truth";
  }
  return "none";
}

Guard Guard::Parse(std::string_view text) {
  Guard guard;
  std::string_view trimmed = Trim(text);
  if (trimmed.empty() || trimmed == "true") return guard;
  guard.source_ = std::string(trimmed);
  std::string_view rest = trimmed;
  for (;;) {
    std::size_t at = rest.find("&&");
    std::string_view part = Trim(rest.substr(0, at));
    if (part.empty()) Bad(text, "empty conjunct");
    guard.atoms_.push_back(ParseAtom(text, part));
    if (at == std::string_view::npos) break;
    rest = rest.substr(at + 2);
  }
  return guard;
}

bool Guard::Evaluate(const ContextFrame& frame) const {
  for (const Atom& atom : atoms_) {
    bool ok = false;
    switch (atom.feature) {
      case Feature::kCandidates:
        ok = Compare(static_cast<long>(frame.candidates.size()), atom.op,
                     atom.number);
        break;
      case Feature::kHole:
      case Feature::kOrigin: {
        std::string value = atom.feature == Feature::kHole
                                ? HoleFeature(frame)
                                : frame.origin_state;
        ok = (value == atom.label) == (atom.op == Comparison::kEq);
        break;
      }
      case Feature::kInRegion: {
        bool inside = false;
        if (frame.indicated) {
          const Vec3& at = frame.indicated->location;
          inside = std::hypot(at.x - atom.region[0], at.z - atom.region[1]) <=
                   atom.region[2];
        }
        ok = inside == atom.truth;
        break;
      }
      default:
        ok = BooleanValue(atom.feature, frame) == atom.truth;
    }
    if (!ok) return false;
  }
  return true;
}

bool Exclusive(const Guard& a, const Guard& b) {
  std::vector<Atom> all = a.atoms();
  all.insert(all.end(), b.atoms().begin(), b.atoms().end());

  // Candidate counts: comparisons against constants, so a witness exists
  // iff one exists in [0, max constant + 1].
  long limit = 0;
  bool any_count = false;
  for (const Atom& atom : all) {
    if (atom.feature == Feature::kCandidates) {
      any_count = true;
      limit = std::max(limit, atom.number + 1);
    }
  }
  if (any_count) {
    bool witness = false;
    for (long n = 0; n <= limit && !witness; ++n) {
      witness = std::all_of(all.begin(), all.end(), [&](const Atom& atom) {
        return atom.feature != Feature::kCandidates ||
               Compare(n, atom.op, atom.number);
      });
    }
    if (!witness) return true;
  }

  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const Atom& x = all[i];
      const Atom& y = all[j];
      if (x.feature != y.feature) continue;
      switch (x.feature) {
        case Feature::kCandidates:
          break;
        case Feature::kHole:
        case Feature::kOrigin:
          if (x.op == Comparison::kEq && y.op == Comparison::kEq &&
              x.label != y.label) {
            return true;
          }
          if (x.op != y.op && x.label == y.label) return true;
          break;
        case Feature::kInRegion:
          if (x.truth != y.truth && std::equal(std::begin(x.region),
                                               std::end(x.region),
                                               std::begin(y.region))) {
            return true;
          }
          break;
        default:
          if (x.truth != y.truth) return true;
      }
    }
  }
  return false;
}

}  // namespace ensemble::automaton
