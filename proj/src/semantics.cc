#include "ensemble/semantics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "ensemble/cps.h"
#include "ensemble/error.h"

namespace ensemble::semantics {

std::string_view BaseTypeName(BaseType base) {
  switch (base) {
    case BaseType::kEntity: return "e";
    case BaseType::kLocation: return "loc";
    case BaseType::kTruth: return "t";
  }
  return "?";
}

SemType SemType::Arrow(SemType from, SemType to) {
  SemType t;
  t.arrow_ = std::make_shared<const std::pair<SemType, SemType>>(
      std::move(from), std::move(to));
  return t;
}

std::string SemType::ToString() const {
  if (!IsArrow()) return std::string(BaseTypeName(base_));
  std::string left = from().ToString();
  if (from().IsArrow()) left = "(" + left + ")";
  return left + " -> " + to().ToString();
}

bool operator==(const SemType& a, const SemType& b) {
  if (a.IsArrow() != b.IsArrow()) return false;
  if (!a.IsArrow()) return a.base_ == b.base_;
  return a.from() == b.from() && a.to() == b.to();
}

bool operator==(const Nested& a, const Nested& b) {
  if (a.form == b.form) return true;
  if (!a.form || !b.form) return false;
  return *a.form == *b.form;
}

SemType SemanticForm::type() const {
  SemType t = result;
  for (auto it = holes.rbegin(); it != holes.rend(); ++it) {
    t = SemType::Arrow(it->type, t);
  }
  return t;
}

Term Nest(SemanticForm form) {
  return Nested{std::make_shared<const SemanticForm>(std::move(form))};
}

SemanticForm Predicate(std::string head, std::vector<Term> args,
                       std::vector<Hole> holes, BaseType result) {
  SemanticForm form{std::move(head), std::move(args), std::move(holes), result,
                    {}};
  Validate(form);
  return form;
}

Term Relation(std::string name, Term argument) {
  SemanticForm form;
  form.head = std::move(name);
  form.args.push_back(std::move(argument));
  form.result = BaseType::kLocation;
  return Nest(std::move(form));
}

SemType TypeOf(const Term& value) {
  return std::visit(
      [](const auto& v) -> SemType {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HoleRef>) {
          throw Error(ErrorKind::kComposition,
                      "hole '" + v.name + "' has no value type");
        } else if constexpr (std::is_same_v<V, EntityRef> ||
                             std::is_same_v<V, RegionRef>) {
          return BaseType::kEntity;
        } else if constexpr (std::is_same_v<V, Nested>) {
          return v.form->type();
        } else {
          return BaseType::kLocation;  // Point, PlaceOf, Indicated
        }
      },
      value);
}

bool IsSaturated(const SemanticForm& form) { return form.holes.empty(); }

namespace {

void CollectHoleRefs(const SemanticForm& form, bool nested,
                     std::vector<std::string>& refs) {
  if (nested && !form.holes.empty()) {
    throw Error(ErrorKind::kValidation,
                "nested form " + form.head + " binds holes");
  }
  for (const Term& arg : form.args) {
    if (const auto* h = std::get_if<HoleRef>(&arg)) {
      refs.push_back(h->name);
    } else if (const auto* n = std::get_if<Nested>(&arg)) {
      if (!n->form) throw Error(ErrorKind::kValidation, "empty nested form");
      CollectHoleRefs(*n->form, true, refs);
    }
  }
}

// Copy of 'form' with every HoleRef{name} replaced by 'value'.
SemanticForm Substitute(const SemanticForm& form, std::string_view name,
                        const Term& value) {
  SemanticForm out = form;
  for (Term& arg : out.args) {
    if (const auto* h = std::get_if<HoleRef>(&arg)) {
      if (h->name == name) arg = value;
    } else if (const auto* n = std::get_if<Nested>(&arg)) {
      arg = Nest(Substitute(*n->form, name, value));
    }
  }
  return out;
}

void AddSatisfied(SemanticForm& form, const std::vector<SemanticForm>& extra) {
  for (const auto& p : extra) {
    if (std::find(form.satisfied.begin(), form.satisfied.end(), p) ==
        form.satisfied.end()) {
      form.satisfied.push_back(p);
    }
  }
}

[[noreturn]] void CannotRaise(const Term& value, const SemType& target) {
  throw Error(ErrorKind::kRaising, "cannot raise " + ToString(value) + " to " +
                                       target.ToString());
}

}  // namespace

void Validate(const SemanticForm& form) {
  std::vector<std::string> refs;
  CollectHoleRefs(form, false, refs);
  std::vector<std::string> binders;
  for (const Hole& hole : form.holes) {
    if (std::find(binders.begin(), binders.end(), hole.name) != binders.end()) {
      throw Error(ErrorKind::kValidation, "duplicate binder " + hole.name);
    }
    binders.push_back(hole.name);
    if (std::count(refs.begin(), refs.end(), hole.name) != 1) {
      throw Error(ErrorKind::kValidation,
                  "binder " + hole.name + " must be referenced exactly once");
    }
  }
  for (const auto& ref : refs) {
    if (std::find(binders.begin(), binders.end(), ref) == binders.end()) {
      throw Error(ErrorKind::kValidation, "unbound hole " + ref);
    }
  }
}

Raised RaiseType(const Term& value, const SemType& target) {
  if (std::holds_alternative<HoleRef>(value)) CannotRaise(value, target);
  if (const auto* d = std::get_if<Indicated>(&value)) {
    if (target == SemType(BaseType::kLocation)) {
      return {Point{d->target.location}, {}};
    }
    if (target == SemType(BaseType::kEntity) &&
        !d->target.objects_in_region.empty()) {
      return {EntityRef{d->target.objects_in_region.front()}, {}};
    }
    CannotRaise(value, target);
  }
  SemType type = TypeOf(value);
  if (type == target) return {value, {}};
  if (target.IsArrow()) CannotRaise(value, target);

  switch (target.base()) {
    case BaseType::kEntity:
      if (const auto* p = std::get_if<Point>(&value)) {
        return {RegionRef{p->at}, {}};
      }
      if (const auto* p = std::get_if<PlaceOf>(&value)) {
        return {EntityRef{p->id}, {}};
      }
      if (const auto* n = std::get_if<Nested>(&value)) {
        const SemanticForm& f = *n->form;
        if (IsSaturated(f) && f.result == BaseType::kTruth &&
            f.args.size() == 1 && std::holds_alternative<EntityRef>(f.args[0])) {
          SemanticForm evidence = f;
          evidence.satisfied.clear();
          return {f.args[0], {std::move(evidence)}};
        }
      }
      break;
    case BaseType::kLocation:
      if (const auto* e = std::get_if<EntityRef>(&value)) {
        return {PlaceOf{e->id}, {}};
      }
      if (const auto* r = std::get_if<RegionRef>(&value)) {
        return {Point{r->center}, {}};
      }
      break;
    case BaseType::kTruth:
      break;
  }
  CannotRaise(value, target);
}

SemanticForm ApplyAt(const SemanticForm& fn, std::size_t hole_index,
                     const Term& value) {
  if (hole_index >= fn.holes.size()) {
    throw Error(ErrorKind::kArity, ToString(fn) + " has no hole " +
                                       std::to_string(hole_index));
  }
  const Hole& hole = fn.holes[hole_index];
  Raised raised;
  try {
    raised = RaiseType(value, hole.type);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kRaising) throw;
    throw Error(ErrorKind::kComposition,
                "cannot apply " + ToString(fn) + " to " + ToString(value));
  }
  SemanticForm out = Substitute(fn, hole.name, raised.value);
  out.holes.erase(out.holes.begin() + static_cast<std::ptrdiff_t>(hole_index));
  AddSatisfied(out, raised.preconditions);
  return out;
}

std::optional<std::size_t> SelectHole(const SemanticForm& fn,
                                      const Term& value) {
  if (std::holds_alternative<HoleRef>(value)) return std::nullopt;
  if (!std::holds_alternative<Indicated>(value)) {
    SemType type = TypeOf(value);
    for (std::size_t i = 0; i < fn.holes.size(); ++i) {
      if (fn.holes[i].type == type) return i;
    }
  }
  for (std::size_t i = 0; i < fn.holes.size(); ++i) {
    try {
      RaiseType(value, fn.holes[i].type);
      return i;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kRaising) throw;
    }
  }
  return std::nullopt;
}

SemanticForm CpsApply(const SemanticForm& fn, const Term& value) {
  if (IsSaturated(fn)) {
    throw Error(ErrorKind::kArity, ToString(fn) + " is saturated");
  }
  std::optional<std::size_t> index = SelectHole(fn, value);
  if (!index) {
    throw Error(ErrorKind::kComposition, "no hole of " + ToString(fn) +
                                             " accepts " + ToString(value));
  }
  // m supplies the function (the form with its selected hole abstracted),
  // n supplies the argument; the continuation receives the application.
  using Fn = std::function<SemanticForm(Term)>;
  cps::Comp<Fn, SemanticForm> m = cps::Pure<SemanticForm>(
      Fn([&fn, i = *index](Term t) { return ApplyAt(fn, i, t); }));
  cps::Comp<Term, SemanticForm> n = cps::Pure<SemanticForm>(value);
  return cps::Run(cps::Apply(std::move(m), std::move(n)));
}

SemanticForm CpsApply(const SemanticForm& fn, const SemanticForm& value) {
  if (!IsSaturated(value)) {
    throw Error(ErrorKind::kComposition,
                "cannot apply " + ToString(fn) + " to unsaturated " +
                    ToString(value));
  }
  return CpsApply(fn, Nest(value));
}

bool OutermostHoleIsDirect(const SemanticForm& form) {
  if (form.holes.empty()) return false;
  for (const Term& arg : form.args) {
    if (const auto* h = std::get_if<HoleRef>(&arg)) {
      if (h->name == form.holes.front().name) return true;
    }
  }
  return false;
}

SemanticForm SpliceHole(const SemanticForm& fn, std::string_view hole_name,
                        const SemanticForm& replacement) {
  auto it = std::find_if(fn.holes.begin(), fn.holes.end(),
                         [&](const Hole& h) { return h.name == hole_name; });
  if (it == fn.holes.end()) {
    throw Error(ErrorKind::kComposition,
                ToString(fn) + " has no hole " + std::string(hole_name));
  }
  if (!(it->type == SemType(replacement.result))) {
    throw Error(ErrorKind::kComposition,
                ToString(replacement) + " does not fit hole " + it->name);
  }
  SemanticForm inner = replacement;
  std::vector<Hole> inner_holes = std::move(inner.holes);
  inner.holes.clear();
  inner.satisfied.clear();
  SemanticForm out = Substitute(fn, hole_name, Nest(std::move(inner)));
  auto pos = out.holes.erase(out.holes.begin() + (it - fn.holes.begin()));
  out.holes.insert(pos, inner_holes.begin(), inner_holes.end());
  Validate(out);
  return out;
}

std::string ToString(const Term& term) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HoleRef>) {
          return v.name;
        } else if constexpr (std::is_same_v<V, EntityRef> ||
                             std::is_same_v<V, PlaceOf>) {
          return v.id;
        } else if constexpr (std::is_same_v<V, Point>) {
          return FormatVec3(v.at);
        } else if constexpr (std::is_same_v<V, RegionRef>) {
          std::string at = FormatVec3(v.center);
          return "region" + at;
        } else if constexpr (std::is_same_v<V, Indicated>) {
          std::string out = "[";
          for (const auto& id : v.target.objects_in_region) out += id + ",";
          return out + FormatVec3(v.target.location) + "]";
        } else {
          return ToString(*v.form);
        }
      },
      term);
}

std::string ToString(const SemanticForm& form) {
  std::string out;
  for (const Hole& hole : form.holes) out += "λ" + hole.name + ".";
  out += form.head + "(";
  for (std::size_t i = 0; i < form.args.size(); ++i) {
    if (i > 0) out += ",";
    out += ToString(form.args[i]);
  }
  return out + ")";
}

namespace {

struct RecordNode {
  enum class Kind { kName, kNumber, kTuple, kCall } kind = Kind::kName;
  std::string name;
  double number = 0.0;
  std::vector<RecordNode> children;
};

class RecordParser {
 public:
  explicit RecordParser(std::string_view text) : text_(text) {}

  std::pair<std::vector<std::string>, RecordNode> ParseForm() {
    std::vector<std::string> binders;
    for (;;) {
      SkipSpace();
      std::size_t width = 0;
      if (text_.substr(pos_, 2) == "λ") width = 2;
      else if (Peek() == '\\') width = 1;
      if (width == 0) break;
      pos_ += width;
      binders.push_back(Identifier());
      Expect('.');
    }
    RecordNode node = ParseTerm();
    SkipSpace();
    if (pos_ != text_.size()) Fail("trailing text");
    return {std::move(binders), std::move(node)};
  }

 private:
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void Fail(const std::string& message) const {
    throw Error(ErrorKind::kSchema, "action record '" + std::string(text_) +
                                        "': " + message + " at offset " +
                                        std::to_string(pos_));
  }
  void Expect(char c) {
    SkipSpace();
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  static bool IdentChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }
  std::string Identifier() {
    SkipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && IdentChar(text_[pos_])) ++pos_;
    if (start == pos_) Fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }
  std::vector<RecordNode> List() {
    std::vector<RecordNode> items;
    Expect('(');
    SkipSpace();
    if (Peek() == ')') {
      ++pos_;
      return items;
    }
    for (;;) {
      items.push_back(ParseTerm());
      SkipSpace();
      if (Peek() == ',') {
        ++pos_;
        continue;
      }
      Expect(')');
      return items;
    }
  }
  RecordNode ParseTerm() {
    SkipSpace();
    RecordNode node;
    char c = Peek();
    if (c == '(') {
      node.kind = RecordNode::Kind::kTuple;
      node.children = List();
      return node;
    }
    if (c == '-' || c == '+' || c == '.' ||
        std::isdigit(static_cast<unsigned char>(c))) {
      std::string rest(text_.substr(pos_));
      char* end = nullptr;
      double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) Fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      node.kind = RecordNode::Kind::kNumber;
      node.number = v;
      return node;
    }
    node.name = Identifier();
    SkipSpace();
    if (Peek() == '(') {
      node.kind = RecordNode::Kind::kCall;
      node.children = List();
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool NumbersMatch(const std::vector<RecordNode>& nodes, const Vec3& v,
                  double tolerance) {
  if (nodes.size() != 3) return false;
  const double xs[3] = {v.x, v.y, v.z};
  for (int i = 0; i < 3; ++i) {
    if (nodes[i].kind != RecordNode::Kind::kNumber) return false;
    if (!(std::abs(nodes[i].number - xs[i]) <= tolerance)) return false;
  }
  return true;
}

bool FormMatches(const RecordNode& node, const SemanticForm& form,
                 double tolerance);

bool TermMatches(const RecordNode& node, const Term& term, double tolerance) {
  using K = RecordNode::Kind;
  return std::visit(
      [&](const auto& v) -> bool {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HoleRef>) {
          return node.kind == K::kName && node.name == v.name;
        } else if constexpr (std::is_same_v<V, EntityRef> ||
                             std::is_same_v<V, PlaceOf>) {
          return node.kind == K::kName && node.name == v.id;
        } else if constexpr (std::is_same_v<V, Point>) {
          return node.kind == K::kTuple && NumbersMatch(node.children, v.at, tolerance);
        } else if constexpr (std::is_same_v<V, RegionRef>) {
          return node.kind == K::kCall && node.name == "region" &&
                 NumbersMatch(node.children, v.center, tolerance);
        } else if constexpr (std::is_same_v<V, Indicated>) {
          return node.kind == K::kTuple &&
                 NumbersMatch(node.children, v.target.location, tolerance);
        } else {
          return FormMatches(node, *v.form, tolerance);
        }
      },
      term);
}

bool FormMatches(const RecordNode& node, const SemanticForm& form,
                 double tolerance) {
  if (node.kind != RecordNode::Kind::kCall || node.name != form.head ||
      node.children.size() != form.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < form.args.size(); ++i) {
    if (!TermMatches(node.children[i], form.args[i], tolerance)) return false;
  }
  return true;
}

}  // namespace

bool MatchesRecord(std::string_view expected, const SemanticForm& form,
                   double tolerance) {
  auto [binders, node] = RecordParser(expected).ParseForm();
  if (binders.size() != form.holes.size()) return false;
  for (std::size_t i = 0; i < binders.size(); ++i) {
    if (binders[i] != form.holes[i].name) return false;
  }
  return FormMatches(node, form, tolerance);
}

}  // namespace ensemble::semantics
