#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ensemble/semantics.h"

namespace ensemble::semantics {

struct SlotSpec {
  std::string name;  // "theme", "destination"
  BaseType type = BaseType::kEntity;
};

// put(x, y) <= grasp(x): evidence head "grasp", its argument binds "theme".
struct PreconditionSpec {
  std::string head;
  std::string binds;
};

struct ActionSpec {
  std::string name;
  std::vector<SlotSpec> slots;
  std::vector<PreconditionSpec> preconditions;

  int SlotIndex(std::string_view slot) const;  // -1 when absent
};

struct RelationSpec {
  std::string name;
  BaseType argument = BaseType::kLocation;
};

// Declarative action and relation signatures.
class ActionTable {
 public:
  void Add(ActionSpec spec);
  void Add(RelationSpec spec);

  const ActionSpec* FindAction(std::string_view name) const;
  const RelationSpec* FindRelation(std::string_view name) const;

  static const ActionTable& Default();

 private:
  std::map<std::string, ActionSpec, std::less<>> actions_;
  std::map<std::string, RelationSpec, std::less<>> relations_;
};

ActionTable LoadActionTable(std::string_view json_text);
ActionTable LoadActionTableFile(const std::string& path);

// Marks 'evidence' as an established precondition of 'action'. When the
// evidence binds a slot that is still a hole, that hole is filled with the
// evidence's argument through CpsApply. Idempotent. Throws
// Error(kPreconditionMismatch) when the action declares no precondition with
// the evidence's head, or the evidence names a different object than the
// slot already holds.
SemanticForm SatisfyPrecondition(const SemanticForm& action,
                                 const SemanticForm& evidence,
                                 const ActionTable& table);

}  // namespace ensemble::semantics
