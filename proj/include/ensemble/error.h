#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ensemble {

enum class ErrorKind {
  kSchema,
  kValidation,
  kNoTarget,
  kUnknownInput,
  kGrammar,
  kComposition,
  kArity,
  kRaising,
  kPreconditionMismatch,
  kDeadInput,
  kStackUnderflow,
  kEpsilonBudget,
  kMode,
  kRebind,
  kIncompleteDemonstration,
  kUnknownGesture,
  kInternal,
};

std::string_view ErrorKindName(ErrorKind kind);

// All engine failures carry a kind so that the dialogue layer can map them
// onto agent moves (usually a confusion move) instead of aborting a session.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ensemble
