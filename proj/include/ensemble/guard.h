#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ensemble/frame.h"

namespace ensemble::automaton {

// Guards are conjunctions of atoms drawn from a closed library, so that
// mutual exclusivity of two guards is decidable. Syntax:
//
//   true                       always passes
//   candidates > 1             integer feature; ops == != < <= > >=
//   indicated, !focus          boolean features: indicated pending
//                              saturated hole_direct focus held
//   hole == location           enum features: hole (none|entity|location|
//                              truth), origin (a state name); ops == !=
//   in_region(x, z, r)         indicated location within r of (x, z)
//   a && b && ...
enum class Feature {
  kCandidates,
  kIndicated,
  kPending,
  kSaturated,
  kHoleDirect,
  kFocus,
  kHeld,
  kHole,
  kOrigin,
  kInRegion,
};

enum class Comparison { kEq, kNe, kLt, kLe, kGt, kGe };

struct Atom {
  Feature feature = Feature::kCandidates;
  Comparison op = Comparison::kEq;
  long number = 0;        // kCandidates
  bool truth = true;      // boolean features and kInRegion
  std::string label;      // kHole / kOrigin
  double region[3] = {};  // kInRegion: x, z, radius
};

class Guard {
 public:
  Guard() = default;  // always true
  static Guard Parse(std::string_view text);  // throws kSchema

  bool Evaluate(const ContextFrame& frame) const;
  bool IsTrivial() const { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::string& source() const { return source_; }

 private:
  std::vector<Atom> atoms_;
  std::string source_ = "true";
};

// True when no frame can satisfy both guards. Sound but incomplete: only
// contradictions on a single feature are detected.
bool Exclusive(const Guard& a, const Guard& b);

// Feature values as guards see them.
std::string HoleFeature(const ContextFrame& frame);

}  // namespace ensemble::automaton
