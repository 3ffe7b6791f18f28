#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ensemble/geometry.h"
#include "ensemble/scene.h"

namespace ensemble::semantics {

enum class BaseType { kEntity, kLocation, kTruth };

std::string_view BaseTypeName(BaseType base);  // "e", "loc", "t"

// A simple type: a base type or an arrow between types (right-associative).
class SemType {
 public:
  SemType() = default;
  SemType(BaseType base) : base_(base) {}  // NOLINT: implicit by design
  static SemType Arrow(SemType from, SemType to);

  bool IsArrow() const { return arrow_ != nullptr; }
  BaseType base() const { return base_; }  // meaningful when !IsArrow()
  const SemType& from() const { return arrow_->first; }
  const SemType& to() const { return arrow_->second; }

  std::string ToString() const;
  friend bool operator==(const SemType& a, const SemType& b);

 private:
  BaseType base_ = BaseType::kTruth;
  std::shared_ptr<const std::pair<SemType, SemType>> arrow_;
};

// Description a hole's filler must match ("that blue cup").
struct Restrictor {
  std::string noun;
  std::set<std::string> attributes;
  bool deictic = false;  // needs a pointing gesture to resolve
  friend bool operator==(const Restrictor&, const Restrictor&) = default;
};

struct Hole {
  std::string name;
  SemType type;
  std::optional<Restrictor> restrictor;
  friend bool operator==(const Hole&, const Hole&) = default;
};

struct SemanticForm;

// Terms. HoleRef marks where a hole sits inside the argument tree; every
// other alternative is a value.
struct HoleRef {
  std::string name;
  friend bool operator==(const HoleRef&, const HoleRef&) = default;
};
struct EntityRef {  // type e
  std::string id;
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
};
struct Point {  // type loc
  Vec3 at;
  friend bool operator==(const Point&, const Point&) = default;
};
struct PlaceOf {  // type loc: the place an object occupies
  std::string id;
  friend bool operator==(const PlaceOf&, const PlaceOf&) = default;
};
struct RegionRef {  // type e: whatever is at a location
  Vec3 center;
  friend bool operator==(const RegionRef&, const RegionRef&) = default;
};
struct Indicated {  // the compound physobj[] • location value of a deixis
  scene::DeixisTarget target;
  friend bool operator==(const Indicated&, const Indicated&) = default;
};
struct Nested {
  std::shared_ptr<const SemanticForm> form;
  friend bool operator==(const Nested& a, const Nested& b);
};

using Term =
    std::variant<HoleRef, EntityRef, Point, PlaceOf, RegionRef, Indicated, Nested>;

// head(args...) with an ordered lambda prefix. 'holes' lists the binders
// outermost first; each binder is referenced by exactly one HoleRef somewhere
// in 'args' (possibly inside a nested form). Nested forms never bind holes.
struct SemanticForm {
  std::string head;
  std::vector<Term> args;
  std::vector<Hole> holes;
  BaseType result = BaseType::kTruth;
  // Preconditions already established (e.g. grasp(cup) for put(cup, v)).
  std::vector<SemanticForm> satisfied;

  // holes[0].type -> holes[1].type -> ... -> result
  SemType type() const;

  friend bool operator==(const SemanticForm&, const SemanticForm&) = default;
};

Term Nest(SemanticForm form);

// Action form with unbound slots: Predicate("put", {HoleRef{"b"}, ...}, holes)
SemanticForm Predicate(std::string head, std::vector<Term> args,
                       std::vector<Hole> holes = {},
                       BaseType result = BaseType::kTruth);
// Location-valued relation such as on(w) or front_of(agent).
Term Relation(std::string name, Term argument);

// Type of a value term. Throws Error(kComposition) for a HoleRef.
SemType TypeOf(const Term& value);

bool IsSaturated(const SemanticForm& form);

// Throws Error(kValidation) when binders are duplicated, unreferenced,
// referenced twice, or bound inside a nested form.
void Validate(const SemanticForm& form);

struct Raised {
  Term value;
  std::vector<SemanticForm> preconditions;  // established by the raising
  friend bool operator==(const Raised&, const Raised&) = default;
};

// Coerces a value to 'target'. Sanctioned coercions:
//   identity when the type already matches
//   deixis -> loc (its location), deixis -> e (nearest object in region)
//   loc -> e (a region reference; a PlaceOf unwraps to its object)
//   e -> loc (the place the object occupies)
//   saturated truth form with one entity argument -> e (that entity; the
//     form is recorded as an established precondition)
// Throws Error(kRaising) otherwise.
Raised RaiseType(const Term& value, const SemType& target);

// Fills hole 'hole_index' with 'value' (raised to the hole's type). Throws
// kArity if out of range and kComposition if no coercion applies.
SemanticForm ApplyAt(const SemanticForm& fn, std::size_t hole_index,
                     const Term& value);

// Continuation-passing application: fills the outermost hole whose type the
// argument has exactly, else the first hole it can be raised to. Holes of
// the same type are therefore filled in order. Throws kArity on a saturated
// form and kComposition when nothing fits.
SemanticForm CpsApply(const SemanticForm& fn, const Term& value);
SemanticForm CpsApply(const SemanticForm& fn, const SemanticForm& value);

// Index of the hole CpsApply would fill, or nullopt.
std::optional<std::size_t> SelectHole(const SemanticForm& fn,
                                      const Term& value);

// True when the outermost hole is a direct argument of the head rather than
// sitting inside a nested relation.
bool OutermostHoleIsDirect(const SemanticForm& form);

// Replaces the binder 'hole_name' by 'replacement', a form whose own binders
// are spliced into the lambda prefix at the same position. Used to refine a
// bare destination v into prep(w).
SemanticForm SpliceHole(const SemanticForm& fn, std::string_view hole_name,
                        const SemanticForm& replacement);

std::string ToString(const Term& term);
std::string ToString(const SemanticForm& form);  // "λw.put(b,on(w))"

// Structural comparison against a textual record such as
// "put(plate,(0,0,1.5))". Numbers compare within 'tolerance'; object ids,
// places and entity references all print as the bare id. Throws kSchema if
// 'expected' does not parse.
bool MatchesRecord(std::string_view expected, const SemanticForm& form,
                   double tolerance = 1e-9);

}  // namespace ensemble::semantics
