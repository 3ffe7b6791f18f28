#include "ensemble/action_table.h"

#include <algorithm>

#include "ensemble/error.h"
#include "json_util.h"
#include "resources.h"

namespace ensemble::semantics {

namespace {

constexpr std::string_view kWhat = "action table";

BaseType ParseBaseType(const std::string& s, const std::string& field) {
  if (s == "e" || s == "entity") return BaseType::kEntity;
  if (s == "loc" || s == "location") return BaseType::kLocation;
  if (s == "t" || s == "truth") return BaseType::kTruth;
  json_util::Fail(kWhat, field, "unknown type '" + s + "'");
}

}  // namespace

int ActionSpec::SlotIndex(std::string_view slot) const {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].name == slot) return static_cast<int>(i);
  }
  return -1;
}

void ActionTable::Add(ActionSpec spec) {
  std::string name = spec.name;
  actions_[name] = std::move(spec);
}

void ActionTable::Add(RelationSpec spec) {
  std::string name = spec.name;
  relations_[name] = std::move(spec);
}

const ActionSpec* ActionTable::FindAction(std::string_view name) const {
  auto it = actions_.find(name);
  return it == actions_.end() ? nullptr : &it->second;
}

const RelationSpec* ActionTable::FindRelation(std::string_view name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

const ActionTable& ActionTable::Default() {
  static const ActionTable table = LoadActionTable(resources::kActionTable);
  return table;
}

ActionTable LoadActionTable(std::string_view json_text) {
  using json_util::json;
  json doc = json_util::Parse(json_text, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  json_util::RejectUnknown(doc, {"actions", "relations"}, kWhat, "");
  ActionTable table;
  const json actions = doc.value("actions", json::array());
  if (!actions.is_array()) json_util::Fail(kWhat, "actions", "expected a list");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const std::string field = "actions[" + std::to_string(i) + "]";
    const json& a = actions[i];
    json_util::RequireObject(a, kWhat, field);
    json_util::RejectUnknown(a, {"name", "slots", "preconditions"}, kWhat, field);
    if (!a.contains("name")) json_util::Fail(kWhat, field + ".name", "required");
    ActionSpec spec;
    spec.name = json_util::String(a["name"], kWhat, field + ".name");
    for (const auto& s : a.value("slots", json::array())) {
      json_util::RequireObject(s, kWhat, field + ".slots");
      json_util::RejectUnknown(s, {"name", "type"}, kWhat, field + ".slots");
      if (!s.contains("name") || !s.contains("type")) {
        json_util::Fail(kWhat, field + ".slots", "slot needs name and type");
      }
      spec.slots.push_back(
          {json_util::String(s["name"], kWhat, field + ".slots.name"),
           ParseBaseType(json_util::String(s["type"], kWhat, field + ".slots.type"),
                         field + ".slots.type")});
    }
    for (const auto& p : a.value("preconditions", json::array())) {
      const std::string pfield = field + ".preconditions";
      json_util::RequireObject(p, kWhat, pfield);
      json_util::RejectUnknown(p, {"head", "binds"}, kWhat, pfield);
      if (!p.contains("head") || !p.contains("binds")) {
        json_util::Fail(kWhat, pfield, "precondition needs head and binds");
      }
      PreconditionSpec pre{json_util::String(p["head"], kWhat, pfield + ".head"),
                           json_util::String(p["binds"], kWhat, pfield + ".binds")};
      if (spec.SlotIndex(pre.binds) < 0) {
        json_util::Fail(kWhat, pfield + ".binds", "no slot '" + pre.binds + "'");
      }
      spec.preconditions.push_back(std::move(pre));
    }
    table.Add(std::move(spec));
  }
  const json relations = doc.value("relations", json::array());
  if (!relations.is_array()) json_util::Fail(kWhat, "relations", "expected a list");
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const std::string field = "relations[" + std::to_string(i) + "]";
    const json& r = relations[i];
    json_util::RequireObject(r, kWhat, field);
    json_util::RejectUnknown(r, {"name", "argument"}, kWhat, field);
    if (!r.contains("name") || !r.contains("argument")) {
      json_util::Fail(kWhat, field, "relation needs name and argument");
    }
    table.Add(RelationSpec{
        json_util::String(r["name"], kWhat, field + ".name"),
        ParseBaseType(json_util::String(r["argument"], kWhat, field + ".argument"),
                      field + ".argument")});
  }
  return table;
}

ActionTable LoadActionTableFile(const std::string& path) {
  return LoadActionTable(json_util::ReadFile(path));
}

SemanticForm SatisfyPrecondition(const SemanticForm& action,
                                 const SemanticForm& evidence,
                                 const ActionTable& table) {
  auto mismatch = [&](const std::string& why) {
    return Error(ErrorKind::kPreconditionMismatch,
                 ToString(evidence) + " does not satisfy " + ToString(action) +
                     ": " + why);
  };
  const ActionSpec* spec = table.FindAction(action.head);
  if (spec == nullptr) throw mismatch("unknown action");
  auto pre = std::find_if(
      spec->preconditions.begin(), spec->preconditions.end(),
      [&](const PreconditionSpec& p) { return p.head == evidence.head; });
  if (pre == spec->preconditions.end()) {
    throw mismatch(action.head + " has no " + evidence.head + " precondition");
  }
  if (!IsSaturated(evidence) || evidence.args.empty()) {
    throw mismatch("evidence is not a complete action");
  }
  SemanticForm plain = evidence;
  plain.satisfied.clear();
  if (std::find(action.satisfied.begin(), action.satisfied.end(), plain) !=
      action.satisfied.end()) {
    return action;
  }

  int evidence_slot = 0;
  if (const ActionSpec* e = table.FindAction(evidence.head)) {
    evidence_slot = std::max(0, e->SlotIndex(pre->binds));
  }
  const Term& value = evidence.args.at(evidence_slot);
  const std::size_t slot = static_cast<std::size_t>(spec->SlotIndex(pre->binds));
  if (slot >= action.args.size()) throw mismatch("malformed action");

  SemanticForm out;
  if (const auto* hole = std::get_if<HoleRef>(&action.args[slot])) {
    auto it = std::find_if(action.holes.begin(), action.holes.end(),
                           [&](const Hole& h) { return h.name == hole->name; });
    out = ApplyAt(action, static_cast<std::size_t>(it - action.holes.begin()),
                  value);
  } else {
    Raised existing = RaiseType(action.args[slot], BaseType::kEntity);
    Raised offered = RaiseType(value, BaseType::kEntity);
    if (!(existing.value == offered.value)) {
      throw mismatch("the action is about " + ToString(action.args[slot]));
    }
    out = action;
  }
  out.satisfied.push_back(std::move(plain));
  return out;
}

}  // namespace ensemble::semantics
