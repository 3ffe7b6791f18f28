#include "ensemble/dialogue.h"

#include <algorithm>
#include <fstream>

#include <fmt/args.h>
#include <fmt/format.h>

#include "ensemble/error.h"
#include "json_util.h"
#include "resources.h"

namespace ensemble::dialogue {

using automaton::ComposeInput;
using automaton::ComposeResult;
using automaton::ContextFrame;
using semantics::EntityRef;
using semantics::Hole;
using semantics::HoleRef;
using semantics::Nested;
using semantics::PlaceOf;
using semantics::Point;
using semantics::RegionRef;
using semantics::SemanticForm;
using semantics::Term;

namespace {

constexpr std::string_view kAgent = "agent";

// Thrown inside compose functions to abandon the input with a confusion
// move, leaving the frame as it was.
struct Refusal {
  AgentMove move;
};

std::map<std::string, std::string> NoFields() { return {}; }

AgentMove Confusion(const Templates& templates, std::string_view key,
                    const std::map<std::string, std::string>& fields = NoFields()) {
  return {MoveKind::kConfusion,
          templates.Format(key, fields, templates.Format("confusion.generic", {})),
          std::nullopt, std::nullopt};
}

std::string_view ConfusionKey(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNoTarget: return "confusion.no_target";
    case ErrorKind::kUnknownInput: return "confusion.unknown_input";
    case ErrorKind::kDeadInput: return "confusion.dead_input";
    case ErrorKind::kComposition:
    case ErrorKind::kRaising:
    case ErrorKind::kArity: return "confusion.composition";
    case ErrorKind::kPreconditionMismatch: return "confusion.precondition";
    case ErrorKind::kUnknownGesture: return "confusion.unknown_gesture";
    default: return "confusion.generic";
  }
}

std::vector<std::string> AllIds(const scene::Scene& scene) {
  std::vector<std::string> ids;
  for (const auto& o : scene.objects) ids.push_back(o.id);
  return ids;
}

std::string DescribeRestrictor(const semantics::Restrictor& r) {
  std::string out = r.deictic ? "that" : "a";
  for (const auto& a : r.attributes) out += " " + a;
  out += " " + (r.noun.empty() ? std::string("thing") : r.noun);
  return out;
}

semantics::Restrictor RestrictorOf(const NounPhrase& np) {
  return {np.noun, np.attributes, np.IsDeictic()};
}

std::vector<Term> EntityTerms(const std::vector<std::string>& ids) {
  std::vector<Term> out;
  for (const auto& id : ids) out.push_back(EntityRef{id});
  return out;
}

std::string HoleNameForSlot(const std::string& slot) {
  if (slot == "theme") return "b";
  if (slot == "destination") return "v";
  return slot;
}

const semantics::ActionSpec& RequireAction(const DialogueEnvironment& env,
                                           const std::string& lemma) {
  const semantics::ActionSpec* spec = env.actions.FindAction(lemma);
  if (spec == nullptr) {
    throw Refusal{Confusion(env.templates, "confusion.unknown_action")};
  }
  return *spec;
}

SemanticForm ActionForm(const semantics::ActionSpec& spec) {
  std::vector<Term> args;
  std::vector<Hole> holes;
  for (const auto& slot : spec.slots) {
    std::string name = HoleNameForSlot(slot.name);
    args.push_back(HoleRef{name});
    holes.push_back({name, slot.type, std::nullopt});
  }
  return semantics::Predicate(spec.name, std::move(args), std::move(holes));
}

std::optional<std::size_t> HoleIndex(const SemanticForm& form,
                                     std::string_view name) {
  for (std::size_t i = 0; i < form.holes.size(); ++i) {
    if (form.holes[i].name == name) return i;
  }
  return std::nullopt;
}

// A relation over a destination phrase: on(w) with w restricted by the noun
// phrase, or front_of(agent).
SemanticForm RelationForm(const PrepPhrase& pp, const DialogueEnvironment& env) {
  const semantics::RelationSpec* spec = env.actions.FindRelation(pp.relation);
  if (spec == nullptr) {
    throw Refusal{Confusion(env.templates, "confusion.unknown_action")};
  }
  SemanticForm form;
  form.head = pp.relation;
  form.result = semantics::BaseType::kLocation;
  if (const auto* region = std::get_if<RelativeRegion>(&pp.object)) {
    form.args.push_back(EntityRef{region->anchor});
  } else {
    form.args.push_back(HoleRef{"w"});
    form.holes.push_back(
        {"w", spec->argument, RestrictorOf(std::get<NounPhrase>(pp.object))});
  }
  return form;
}

void SetRestrictor(SemanticForm& form, std::string_view hole,
                   semantics::Restrictor restrictor) {
  if (auto i = HoleIndex(form, hole)) form.holes[*i].restrictor = std::move(restrictor);
}

// Fills holes whose description picks out exactly one object. Described
// holes further in are filled as soon as they are unique; only the outermost
// one may turn into a candidate list. Deictic descriptions wait for a
// pointing gesture and are only tried on the outermost hole.
void ResolveRestrictedHoles(ContextFrame& frame, const DialogueEnvironment& env) {
  bool progress = true;
  while (progress && frame.pending_form) {
    progress = false;
    const auto& holes = frame.pending_form->holes;
    for (std::size_t i = 0; i < holes.size(); ++i) {
      if (!holes[i].restrictor) continue;
      const semantics::Restrictor r = *holes[i].restrictor;
      std::vector<std::string> pool;
      if (r.deictic) {
        // Locations inside a relation get the region plus the bare point;
        // that is offered from InterpDeixis.
        if (i != 0 || !frame.indicated ||
            (holes[i].type == semantics::BaseType::kLocation &&
             !semantics::OutermostHoleIsDirect(*frame.pending_form))) {
          continue;
        }
        pool = frame.indicated->objects_in_region;
      } else {
        pool = AllIds(env.scene);
      }
      std::vector<std::string> matches =
          scene::FilterByDescription(pool, env.scene, r.noun, r.attributes);
      if (matches.empty()) {
        throw Refusal{Confusion(env.templates, "confusion.no_match",
                                {{"description", DescribeRestrictor(r)}})};
      }
      if (matches.size() > 1) {
        if (i == 0) {
          frame.candidates = EntityTerms(matches);
          return;
        }
        continue;
      }
      frame.pending_form = semantics::ApplyAt(*frame.pending_form, i, EntityRef{matches[0]});
      progress = true;
      break;
    }
  }
}

std::vector<std::string> ResolveNounPhrase(const NounPhrase& np,
                                           const ContextFrame& frame,
                                           const DialogueEnvironment& env) {
  std::vector<std::string> pool = np.IsDeictic() && frame.indicated
                                      ? frame.indicated->objects_in_region
                                      : AllIds(env.scene);
  return scene::FilterByDescription(pool, env.scene, np.noun, np.attributes);
}

scene::DeixisTarget Resolve(const DeixisGesture& g, const DialogueEnvironment& env) {
  return scene::ResolveDeixis(env.scene, g.origin, g.direction);
}

// Shared by the V/alpha/P handlers.
ContextFrame IntegrateVerbPhrase(ContextFrame f, const VerbPhrase& vp,
                                 const DialogueEnvironment& env) {
  const semantics::ActionSpec& spec = RequireAction(env, vp.lemma);
  SemanticForm form = ActionForm(spec);
  f.candidates.clear();

  bool theme_from_focus = false;
  if (HoleIndex(form, "b")) {
    if (!vp.theme) {
      theme_from_focus = f.focus.has_value();
    } else if (const auto* np = std::get_if<NounPhrase>(&*vp.theme)) {
      SetRestrictor(form, "b", RestrictorOf(*np));
    } else if (f.focus) {
      theme_from_focus = true;
    } else {
      // "it" with nothing in focus: ask rather than guess.
      std::vector<std::string> graspable;
      for (const auto& o : env.scene.objects) {
        if (o.graspable) graspable.push_back(o.id);
      }
      f.candidates = EntityTerms(graspable);
    }
  }

  if (vp.destination && HoleIndex(form, "v")) {
    if (const auto* pp = std::get_if<PrepPhrase>(&*vp.destination)) {
      form = semantics::SpliceHole(form, "v", RelationForm(*pp, env));
    } else if (f.indicated) {
      form = semantics::ApplyAt(form, *HoleIndex(form, "v"),
                                Point{f.indicated->location});
    }
  }
  if (theme_from_focus) {
    form = semantics::ApplyAt(form, *HoleIndex(form, "b"), EntityRef{*f.focus});
  }
  f.pending_form = std::move(form);
  if (f.candidates.empty()) ResolveRestrictedHoles(f, env);
  return f;
}

DialogueEnvironment& Env(const ComposeInput& in) {
  return static_cast<DialogueEnvironment&>(in.env);
}

template <typename T>
const T& Content(const ComposeInput& in) {
  if (in.token == nullptr) throw Error(ErrorKind::kInternal, "missing input");
  const T* content = std::get_if<T>(&in.token->content);
  if (content == nullptr) {
    throw Error(ErrorKind::kInternal, "unexpected input content");
  }
  return *content;
}

ContextFrame IntegrateObject(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  const NounPhrase& np = Content<NounPhrase>(in);
  f.candidates.clear();

  if (np.IsDeictic() && !f.indicated) {
    // "that cup" before the pointing: wait for the gesture.
    if (f.pending_form && !f.pending_form->holes.empty() &&
        f.pending_form->holes.front().type == semantics::BaseType::kEntity) {
      f.pending_form->holes.front().restrictor = RestrictorOf(np);
      return f;
    }
    if (np.noun.empty()) {
      throw Refusal{Confusion(env.templates, "confusion.no_target")};
    }
  }
  std::vector<std::string> matches = ResolveNounPhrase(np, f, env);
  if (matches.empty()) {
    throw Refusal{Confusion(env.templates, "confusion.no_match",
                            {{"description", DescribeRestrictor(RestrictorOf(np))}})};
  }
  if (f.pending_form && !f.pending_form->holes.empty()) {
    if (matches.size() > 1) {
      f.candidates = EntityTerms(matches);
      return f;
    }
    f.pending_form = semantics::CpsApply(*f.pending_form, Term{EntityRef{matches[0]}});
    ResolveRestrictedHoles(f, env);
    return f;
  }
  if (matches.size() > 1) {
    f.pending_form.reset();
    f.candidates = EntityTerms(matches);
    return f;
  }
  // An object on its own: the agent reaches for it and keeps it in focus.
  f.focus = matches[0];
  f.pending_form = semantics::Predicate("reach", {EntityRef{matches[0]}});
  return f;
}

ContextFrame IntegrateDeixis(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  f.indicated = Resolve(Content<DeixisGesture>(in), env);
  const auto& region = f.indicated->objects_in_region;
  if (f.pending_form && !f.pending_form->holes.empty() &&
      f.pending_form->holes.front().type == semantics::BaseType::kEntity) {
    const Hole& hole = f.pending_form->holes.front();
    std::vector<std::string> matches =
        hole.restrictor ? scene::FilterByDescription(region, env.scene,
                                                     hole.restrictor->noun,
                                                     hole.restrictor->attributes)
                        : region;
    if (matches.empty()) {
      throw Refusal{Confusion(env.templates, "confusion.nothing_there")};
    }
    if (matches.size() > 1) {
      f.candidates = EntityTerms(matches);
      return f;
    }
    f.pending_form = semantics::ApplyAt(*f.pending_form, 0, EntityRef{matches[0]});
    ResolveRestrictedHoles(f, env);
    return f;
  }
  if (!f.pending_form && !f.focus && region.size() == 1) f.focus = region[0];
  ResolveRestrictedHoles(f, env);
  return f;
}

ContextFrame IntegrateAction(const ComposeInput& in, ContextFrame f) {
  const DialogueEnvironment& env = Env(in);
  VerbPhrase vp;
  if (const auto* motion = std::get_if<DynamicIconicGesture>(&in.token->content)) {
    auto it = env.lexicon.motions.find(motion->motion_id);
    if (it == env.lexicon.motions.end()) {
      throw Refusal{Confusion(env.templates, "confusion.unknown_motion")};
    }
    vp.lemma = it->second;
  } else {
    vp = Content<VerbPhrase>(in);
  }
  return IntegrateVerbPhrase(std::move(f), vp, env);
}

ContextFrame IntegratePrep(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  const PrepPhrase& pp = Content<PrepPhrase>(in);
  if (f.pending_form && HoleIndex(*f.pending_form, "v")) {
    f.candidates.clear();
    f.pending_form = semantics::SpliceHole(*f.pending_form, "v", RelationForm(pp, env));
    ResolveRestrictedHoles(f, env);
    return f;
  }
  VerbPhrase vp{"put", std::nullopt, Destination{pp}};
  return IntegrateVerbPhrase(std::move(f), vp, env);
}

ContextFrame IntegrateGesture(const ComposeInput& in, ContextFrame f) {
  const DialogueEnvironment& env = Env(in);
  const auto& shape = std::get<StaticIconicGesture>(in.token->content);
  const GestureLexiconEntry* entry = env.gestures.Find(shape.shape_id);
  if (entry == nullptr) {
    throw Refusal{Confusion(env.templates, "confusion.unknown_gesture")};
  }
  const SemanticForm& bound = entry->bound_form;
  f.candidates.clear();
  if (f.pending_form && !f.pending_form->holes.empty()) {
    const semantics::ActionSpec* spec = env.actions.FindAction(f.pending_form->head);
    bool is_precondition =
        spec != nullptr &&
        std::any_of(spec->preconditions.begin(), spec->preconditions.end(),
                    [&](const auto& p) { return p.head == bound.head; });
    f.pending_form =
        is_precondition
            ? semantics::SatisfyPrecondition(*f.pending_form, bound, env.actions)
            : semantics::CpsApply(*f.pending_form, bound);
  } else {
    f.pending_form = bound;
  }
  ResolveRestrictedHoles(f, env);
  return f;
}

ContextFrame OfferDeixisCandidates(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  const Hole& hole = f.pending_form->holes.front();
  std::vector<std::string> objects = f.indicated->objects_in_region;
  bool described = hole.restrictor && (!hole.restrictor->noun.empty() ||
                                       !hole.restrictor->attributes.empty());
  if (described) {
    objects = scene::FilterByDescription(objects, env.scene, hole.restrictor->noun,
                                         hole.restrictor->attributes);
  }
  f.candidates = EntityTerms(objects);
  if (!described || f.candidates.empty()) {
    f.candidates.push_back(Point{f.indicated->location});
  }
  return f;
}

ContextFrame NarrowCandidates(const ComposeInput& in, std::vector<AgentMove>& moves) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  std::optional<NounPhrase> description;
  if (const auto* np = std::get_if<NounPhrase>(&in.token->content)) {
    description = *np;
  } else {
    const auto& pp = std::get<PrepPhrase>(in.token->content);
    if (const auto* inner = std::get_if<NounPhrase>(&pp.object)) {
      description = *inner;
    } else {
      const auto& region = std::get<RelativeRegion>(pp.object);
      f.candidates = {semantics::Relation(region.relation, EntityRef{region.anchor})};
      return f;
    }
  }
  std::vector<Term> kept;
  for (const Term& c : f.candidates) {
    const auto* e = std::get_if<EntityRef>(&c);
    if (e == nullptr) continue;
    if (!scene::FilterByDescription({e->id}, env.scene, description->noun,
                                    description->attributes)
             .empty()) {
      kept.push_back(c);
    }
  }
  if (kept.empty()) {
    moves.push_back(Confusion(env.templates, "confusion.no_match",
                              {{"description",
                                DescribeRestrictor(RestrictorOf(*description))}}));
  } else {
    f.candidates = std::move(kept);
  }
  return f;
}

ContextFrame Repoint(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.read;
  f.indicated = Resolve(Content<DeixisGesture>(in), env);
  std::vector<Term> fresh = EntityTerms(f.indicated->objects_in_region);
  if (f.origin_state == "InterpDeixis") fresh.push_back(Point{f.indicated->location});
  if (fresh.empty()) throw Refusal{Confusion(env.templates, "confusion.nothing_there")};
  f.candidates = std::move(fresh);
  return f;
}

ContextFrame AcceptCandidate(const ComposeInput& in) {
  const DialogueEnvironment& env = Env(in);
  ContextFrame f = in.base;
  const Term& chosen = in.read.candidates.at(0);
  f.candidates.clear();
  f.indicated = in.read.indicated;
  if (in.read.pending_form && !in.read.pending_form->holes.empty()) {
    f.pending_form = semantics::CpsApply(*in.read.pending_form, chosen);
    ResolveRestrictedHoles(f, env);
    return f;
  }
  const auto* e = std::get_if<EntityRef>(&chosen);
  if (e == nullptr) throw Refusal{Confusion(env.templates, "confusion.no_candidate")};
  f.focus = e->id;
  f.pending_form = semantics::Predicate("reach", {EntityRef{e->id}});
  return f;
}

ComposeResult Execute(const ComposeInput& in) {
  DialogueEnvironment& env = Env(in);
  ComposeResult result{in.base, {}};
  const SemanticForm& form = *in.read.pending_form;
  Execution done = ExecuteAction(form, env.scene, env.actions, env.templates);
  result.moves = std::move(done.moves);
  result.frame.focus = in.read.focus;
  if (done.performed && !form.args.empty()) {
    if (const auto* e = std::get_if<EntityRef>(&form.args[0])) {
      result.frame.focus = e->id;
    }
  }
  result.frame = env.Sanitize(std::move(result.frame));
  return result;
}

// Wraps a frame-producing handler: refusals and engine errors become a
// confusion move and leave the frame as it was.
automaton::ComposeFn Guarded(std::function<ContextFrame(const ComposeInput&,
                                                        std::vector<AgentMove>&)>
                                 handler) {
  return [handler = std::move(handler)](const ComposeInput& in) -> ComposeResult {
    ComposeResult result{in.base, {}};
    try {
      result.frame = handler(in, result.moves);
    } catch (const Refusal& r) {
      result.frame = in.base;
      result.moves = {r.move};
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kInternal) throw;
      result.frame = in.base;
      result.moves = {Confusion(Env(in).templates, ConfusionKey(e.kind()))};
    }
    return result;
  };
}

automaton::ComposeFn Simple(std::function<ContextFrame(const ComposeInput&)> fn) {
  return Guarded([fn = std::move(fn)](const ComposeInput& in,
                                      std::vector<AgentMove>&) { return fn(in); });
}

std::string RenderNested(const SemanticForm& form, const scene::Scene& scene,
                         bool agent_speaking) {
  static const std::map<std::string, std::string, std::less<>> kRelations = {
      {"on", "on"}, {"in", "in"}, {"at", "at"}, {"next_to", "next to"},
      {"front_of", "in front of"}};
  auto it = kRelations.find(form.head);
  if (it != kRelations.end() && form.args.size() == 1) {
    const Term& arg = form.args[0];
    std::string object = std::holds_alternative<Point>(arg)
                             ? "that spot"
                             : Render(arg, scene, agent_speaking);
    return it->second + " " + object;
  }
  std::string out = form.head;
  for (const Term& arg : form.args) out += " " + Render(arg, scene, agent_speaking);
  return out;
}

// Field values for the slots of an action form.
std::map<std::string, std::string> SlotFields(const SemanticForm& form,
                                              const scene::Scene& scene,
                                              const semantics::ActionTable& actions,
                                              bool agent_speaking) {
  std::map<std::string, std::string> fields;
  const semantics::ActionSpec* spec = actions.FindAction(form.head);
  for (std::size_t i = 0; i < form.args.size(); ++i) {
    std::string slot = spec != nullptr && i < spec->slots.size()
                           ? spec->slots[i].name
                           : "arg" + std::to_string(i);
    const Term& arg = form.args[i];
    std::string text;
    if (slot == "destination" && std::holds_alternative<Point>(arg)) {
      text = "there";
    } else if (slot == "destination" && std::holds_alternative<HoleRef>(arg)) {
      text = "somewhere";
    } else {
      text = Render(arg, scene, agent_speaking);
    }
    fields[slot] = text;
  }
  return fields;
}

std::optional<std::string> ThemeId(const Term& term, const scene::Scene& scene) {
  if (const auto* e = std::get_if<EntityRef>(&term)) return e->id;
  if (const auto* p = std::get_if<PlaceOf>(&term)) return p->id;
  if (const auto* r = std::get_if<RegionRef>(&term)) {
    std::optional<std::string> best;
    double best_d = scene.deixis_region_radius;
    for (const auto& o : scene.objects) {
      double d = HorizontalDistance(o.position, r->center);
      if (d <= best_d) {
        best = o.id;
        best_d = d;
      }
    }
    return best;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gesture lexicon

void GestureLexicon::Bind(GestureLexiconEntry entry) {
  if (entries_.count(entry.shape_id)) {
    throw Error(ErrorKind::kRebind,
                "gesture '" + entry.shape_id + "' is already bound");
  }
  std::string key = entry.shape_id;
  entries_.emplace(std::move(key), std::move(entry));
}

bool GestureLexicon::Unbind(std::string_view shape_id) {
  auto it = entries_.find(shape_id);
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

const GestureLexiconEntry* GestureLexicon::Find(std::string_view shape_id) const {
  auto it = entries_.find(shape_id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string GestureLexicon::ToJson() const {
  json_util::json list = json_util::json::array();
  for (const auto& [id, e] : entries_) {
    json_util::json args = json_util::json::array();
    for (const Term& arg : e.bound_form.args) {
      const auto* ref = std::get_if<EntityRef>(&arg);
      if (ref == nullptr) {
        throw Error(ErrorKind::kInternal, "gesture form with a non-object argument");
      }
      args.push_back(ref->id);
    }
    list.push_back({{"shape_id", e.shape_id},
                    {"head", e.bound_form.head},
                    {"args", args},
                    {"pose", e.pose},
                    {"learned_at", e.learned_at}});
  }
  return json_util::json{{"gestures", list}}.dump(2) + "\n";
}

GestureLexicon GestureLexicon::FromJson(std::string_view json_text) {
  constexpr std::string_view kWhat = "gesture lexicon";
  auto doc = json_util::Parse(json_text, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  json_util::RejectUnknown(doc, {"gestures"}, kWhat, "");
  GestureLexicon lexicon;
  const auto list = doc.value("gestures", json_util::json::array());
  if (!list.is_array()) json_util::Fail(kWhat, "gestures", "expected a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string field = "gestures[" + std::to_string(i) + "]";
    const auto& g = list[i];
    json_util::RequireObject(g, kWhat, field);
    json_util::RejectUnknown(g, {"shape_id", "head", "args", "pose", "learned_at"},
                             kWhat, field);
    if (!g.contains("shape_id") || !g.contains("head")) {
      json_util::Fail(kWhat, field, "needs shape_id and head");
    }
    GestureLexiconEntry entry;
    entry.shape_id = json_util::String(g["shape_id"], kWhat, field + ".shape_id");
    std::vector<Term> args;
    for (const auto& a : g.value("args", json_util::json::array())) {
      args.push_back(EntityRef{json_util::String(a, kWhat, field + ".args")});
    }
    entry.bound_form = semantics::Predicate(
        json_util::String(g["head"], kWhat, field + ".head"), std::move(args));
    if (g.contains("pose")) entry.pose = json_util::String(g["pose"], kWhat, field + ".pose");
    if (g.contains("learned_at")) {
      entry.learned_at = static_cast<std::uint64_t>(
          json_util::Number(g["learned_at"], kWhat, field + ".learned_at"));
    }
    lexicon.Bind(std::move(entry));
  }
  return lexicon;
}

void GestureLexicon::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kSchema, "cannot write " + path);
  out << ToJson();
}

GestureLexicon GestureLexicon::Load(const std::string& path) {
  return FromJson(json_util::ReadFile(path));
}

GestureLexiconEntry LearnGesture(GestureLexicon& lexicon, std::string shape_id,
                                 const std::vector<InputEvent>& demonstration,
                                 const scene::Scene& scene, const Lexicon& words,
                                 const semantics::ActionTable& actions,
                                 std::uint64_t now) {
  if (lexicon.Find(shape_id) != nullptr) {
    throw Error(ErrorKind::kRebind, "gesture '" + shape_id + "' is already bound");
  }
  if (actions.FindAction("grasp") == nullptr) {
    throw Error(ErrorKind::kIncompleteDemonstration, "no grasp action is defined");
  }
  std::optional<std::string> referent;
  std::optional<std::string> grasped;
  bool saw_grasp = false;
  auto unique = [&](const NounPhrase& np) -> std::optional<std::string> {
    auto ids = scene::FilterByDescription(AllIds(scene), scene, np.noun, np.attributes);
    if (ids.size() == 1) return ids[0];
    return std::nullopt;
  };
  for (const InputEvent& event : demonstration) {
    std::vector<InputToken> tokens;
    try {
      tokens = ClassifyEvent(event, words);
    } catch (const Error&) {
      continue;
    }
    for (const InputToken& token : tokens) {
      if (const auto* np = std::get_if<NounPhrase>(&token.content)) {
        if (auto id = unique(*np)) referent = id;
      } else if (const auto* d = std::get_if<DeixisGesture>(&token.content)) {
        try {
          auto target = scene::ResolveDeixis(scene, d->origin, d->direction);
          if (!target.objects_in_region.empty()) {
            referent = target.objects_in_region.front();
          }
        } catch (const Error&) {
        }
      } else if (const auto* vp = std::get_if<VerbPhrase>(&token.content)) {
        if (vp->theme) {
          if (const auto* np = std::get_if<NounPhrase>(&*vp->theme)) {
            if (auto id = unique(*np)) referent = id;
          }
        }
        if (vp->lemma == "grasp") {
          saw_grasp = true;
          if (referent) grasped = referent;
        }
      } else if (const auto* m = std::get_if<DynamicIconicGesture>(&token.content)) {
        auto it = words.motions.find(m->motion_id);
        if (it != words.motions.end() && it->second == "grasp") {
          saw_grasp = true;
          if (referent) grasped = referent;
        }
      }
    }
  }
  if (!saw_grasp) {
    throw Error(ErrorKind::kIncompleteDemonstration,
                "the demonstration shows no grasp");
  }
  if (!grasped) {
    throw Error(ErrorKind::kIncompleteDemonstration,
                "the demonstration does not single out an object");
  }
  GestureLexiconEntry entry{shape_id,
                            semantics::Predicate("grasp", {EntityRef{*grasped}}),
                            shape_id, now};
  lexicon.Bind(entry);
  return entry;
}

// ---------------------------------------------------------------------------
// Templates and resources

bool Templates::Has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

std::string Templates::Format(std::string_view key,
                              const std::map<std::string, std::string>& fields,
                              std::string_view fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback.empty() ? std::string(key) : std::string(fallback);
  }
  fmt::dynamic_format_arg_store<fmt::format_context> store;
  for (const auto& [name, value] : fields) {
    store.push_back(fmt::arg(name.c_str(), value));
  }
  try {
    return fmt::vformat(it->second, store);
  } catch (const fmt::format_error&) {
    return it->second;
  }
}

Templates LoadTemplates(std::string_view json_text) {
  constexpr std::string_view kWhat = "templates";
  auto doc = json_util::Parse(json_text, kWhat);
  json_util::RequireObject(doc, kWhat, "<root>");
  std::map<std::string, std::string, std::less<>> entries;
  for (const auto& [key, value] : doc.items()) {
    entries[key] = json_util::String(value, kWhat, key);
  }
  return Templates(std::move(entries));
}

const Templates& Templates::Default() {
  static const Templates templates = LoadTemplates(resources::kTemplates);
  return templates;
}

const Resources& Resources::Default() {
  static const Resources resources = [] {
    Resources r;
    r.lexicon = std::shared_ptr<const Lexicon>(&Lexicon::Default(), [](const Lexicon*) {});
    r.actions = std::shared_ptr<const semantics::ActionTable>(
        &semantics::ActionTable::Default(), [](const semantics::ActionTable*) {});
    r.templates = std::shared_ptr<const Templates>(&Templates::Default(),
                                                   [](const Templates*) {});
    r.machine = std::make_shared<const automaton::Machine>(BuildInteractionMachine());
    return r;
  }();
  return resources;
}

DialogueEnvironment::DialogueEnvironment(scene::Scene scene_in,
                                         const Resources& resources)
    : scene(std::move(scene_in)),
      lexicon(*resources.lexicon),
      actions(*resources.actions),
      templates(*resources.templates) {}

ContextFrame DialogueEnvironment::Sanitize(ContextFrame frame) const {
  frame.held.clear();
  for (const auto& o : scene.objects) {
    if (o.held_by && *o.held_by == kAgent) frame.held.insert(o.id);
  }
  if (frame.focus && scene.Find(*frame.focus) == nullptr) frame.focus.reset();
  return frame;
}

AgentMove DialogueEnvironment::Render(const automaton::MoveTemplate& emit,
                                      const ContextFrame& top) {
  if (emit.kind == MoveKind::kQuestion) return ProposeCandidate(top, scene, templates);
  std::map<std::string, std::string> fields;
  if (top.focus) {
    if (const auto* o = scene.Find(*top.focus)) fields["theme"] = scene::Describe(*o);
  }
  return {emit.kind, templates.Format(emit.key, fields), std::nullopt, std::nullopt};
}

automaton::ComposeRegistry InteractionComposeRegistry() {
  automaton::ComposeRegistry registry;
  registry["integrate_object"] = Simple(IntegrateObject);
  registry["integrate_deixis"] = Simple(IntegrateDeixis);
  registry["record_deixis"] = Simple([](const ComposeInput& in) {
    ContextFrame f = in.read;
    f.indicated = Resolve(Content<DeixisGesture>(in), Env(in));
    return f;
  });
  registry["integrate_action"] =
      Simple([](const ComposeInput& in) { return IntegrateAction(in, in.base); });
  registry["integrate_prep"] = Simple(IntegratePrep);
  registry["integrate_gesture"] =
      Simple([](const ComposeInput& in) { return IntegrateGesture(in, in.base); });
  registry["fill_indicated"] = Simple([](const ComposeInput& in) {
    ContextFrame f = in.read;
    f.pending_form =
        semantics::ApplyAt(*f.pending_form, 0, Point{f.indicated->location});
    ResolveRestrictedHoles(f, Env(in));
    return f;
  });
  registry["offer_deixis_candidates"] = Simple(OfferDeixisCandidates);
  registry["advance_candidate"] = Simple([](const ComposeInput& in) {
    ContextFrame f = in.read;
    f.candidates.erase(f.candidates.begin());
    return f;
  });
  registry["clear_indication"] = Simple([](const ComposeInput& in) {
    ContextFrame f = in.base;
    f.indicated.reset();
    f.candidates.clear();
    return f;
  });
  registry["clear_candidates"] = Simple([](const ComposeInput& in) {
    ContextFrame f = in.base;
    f.candidates.clear();
    return f;
  });
  registry["accept_candidate"] = Simple(AcceptCandidate);
  registry["narrow_candidates"] = Guarded(NarrowCandidates);
  registry["repoint"] = Simple(Repoint);
  registry["execute"] = Execute;
  return registry;
}

std::string_view InteractionMachineDefinition() {
  return resources::kInteractionMachine;
}

automaton::Machine BuildInteractionMachine() {
  return automaton::LoadMachine(InteractionMachineDefinition(),
                                InteractionComposeRegistry());
}

// ---------------------------------------------------------------------------
// Questions, execution, rendering

AgentMove ProposeCandidate(const ContextFrame& frame, const scene::Scene& scene,
                           const Templates& templates) {
  if (frame.candidates.empty()) {
    throw Error(ErrorKind::kInternal, "no candidate to ask about");
  }
  const Term& head = frame.candidates.front();
  AgentMove move;
  move.kind = MoveKind::kQuestion;
  move.named_candidate = head;
  std::map<std::string, std::string> fields;
  fields["candidate"] = Render(head, scene);
  if (std::holds_alternative<Point>(head)) fields["candidate"] = "that spot";
  std::string key = "question.object";
  if (frame.pending_form && !frame.pending_form->holes.empty()) {
    try {
      SemanticForm tentative = semantics::CpsApply(*frame.pending_form, head);
      auto slots = SlotFields(tentative, scene, semantics::ActionTable::Default(), true);
      fields.insert(slots.begin(), slots.end());
      if (templates.Has("question." + tentative.head)) {
        key = "question." + tentative.head;
      }
    } catch (const Error&) {
    }
  }
  move.text = templates.Format(key, fields);
  return move;
}

Vec3 ResolveLocation(const Term& term, const scene::Scene& scene) {
  auto ground = [&](Vec3 v) {
    v.y = scene.ground_plane_height;
    return v;
  };
  auto place = [&](const std::string& id) {
    if (id == kAgent) return ground(scene.agent_origin);
    return ground(scene.Get(id).position);
  };
  if (const auto* p = std::get_if<Point>(&term)) return ground(p->at);
  if (const auto* p = std::get_if<PlaceOf>(&term)) return place(p->id);
  if (const auto* e = std::get_if<EntityRef>(&term)) return place(e->id);
  if (const auto* r = std::get_if<RegionRef>(&term)) return ground(r->center);
  if (const auto* d = std::get_if<semantics::Indicated>(&term)) {
    return ground(d->target.location);
  }
  if (const auto* n = std::get_if<Nested>(&term)) {
    const SemanticForm& f = *n->form;
    if (f.args.size() == 1 && semantics::IsSaturated(f)) {
      if (f.head == "front_of") {
        const auto* anchor = std::get_if<EntityRef>(&f.args[0]);
        if (anchor != nullptr && anchor->id == kAgent) return scene.FrontOfAgent();
        Vec3 at = ResolveLocation(f.args[0], scene);
        Vec3 toward = scene.human_viewpoint - at;
        double length = std::hypot(toward.x, toward.z);
        if (length > 0.0) {
          at.x += scene.front_offset * toward.x / length;
          at.z += scene.front_offset * toward.z / length;
        }
        return at;
      }
      if (f.head == "next_to") {
        Vec3 at = ResolveLocation(f.args[0], scene);
        at.x += scene.deixis_region_radius * 0.5;
        return at;
      }
      return ResolveLocation(f.args[0], scene);
    }
  }
  throw Error(ErrorKind::kComposition, "no place for " + semantics::ToString(term));
}

Execution ExecuteAction(const SemanticForm& form, scene::Scene& scene,
                        const semantics::ActionTable& actions,
                        const Templates& templates) {
  Execution out;
  auto refuse = [&](std::string_view key, std::map<std::string, std::string> fields) {
    out.moves.push_back(Confusion(templates, key, fields));
    return out;
  };
  if (!semantics::IsSaturated(form) || actions.FindAction(form.head) == nullptr ||
      form.args.empty()) {
    return refuse("confusion.unknown_action", {});
  }
  std::optional<std::string> theme = ThemeId(form.args[0], scene);
  if (!theme || scene.Find(*theme) == nullptr) {
    return refuse("confusion.nothing_there", {});
  }
  scene::WorldObject& object = scene.Get(*theme);
  std::map<std::string, std::string> fields =
      SlotFields(form, scene, actions, false);
  fields["theme"] = scene::Describe(object);

  SemanticForm record = form;
  if (form.head == "grasp" || form.head == "put") {
    if (!object.graspable) return refuse("confusion.not_graspable", fields);
  }
  if (form.head == "put") {
    Vec3 destination;
    try {
      destination = ResolveLocation(form.args.at(1), scene);
    } catch (const Error&) {
      return refuse("confusion.out_of_bounds", fields);
    }
    if (!scene.InBounds(destination)) return refuse("confusion.out_of_bounds", fields);
    SemanticForm grasp = semantics::Predicate("grasp", {EntityRef{object.id}});
    if (std::find(record.satisfied.begin(), record.satisfied.end(), grasp) ==
        record.satisfied.end()) {
      record.satisfied.push_back(grasp);
    }
    object.position = destination;
    object.held_by.reset();
  } else if (form.head == "grasp") {
    object.held_by = std::string(kAgent);
  }
  out.performed = true;
  out.record = record;
  out.moves.push_back({MoveKind::kAction,
                       templates.Format("action." + form.head, fields, form.head),
                       record, std::nullopt});
  out.moves.push_back({MoveKind::kAck,
                       templates.Format("ack." + form.head, fields,
                                        templates.Format("ack.ok", {})),
                       std::nullopt, std::nullopt});
  return out;
}

std::string Render(const Term& term, const scene::Scene& scene,
                   bool agent_speaking) {
  auto object = [&](const std::string& id) -> std::string {
    if (id == kAgent) return agent_speaking ? "me" : "itself";
    if (const auto* o = scene.Find(id)) return scene::Describe(*o);
    return id;
  };
  return std::visit(
      [&](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HoleRef>) {
          return "something";
        } else if constexpr (std::is_same_v<V, EntityRef> || std::is_same_v<V, PlaceOf>) {
          return object(v.id);
        } else if constexpr (std::is_same_v<V, Point>) {
          return "that spot";
        } else if constexpr (std::is_same_v<V, RegionRef>) {
          return "whatever is there";
        } else if constexpr (std::is_same_v<V, semantics::Indicated>) {
          return "there";
        } else {
          return RenderNested(*v.form, scene, agent_speaking);
        }
      },
      term);
}

}  // namespace ensemble::dialogue
