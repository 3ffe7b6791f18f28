#include <doctest.h>

#include <string>

#include "ensemble/action_table.h"
#include "ensemble/cps.h"
#include "ensemble/error.h"
#include "ensemble/semantics.h"

using namespace ensemble;
using namespace ensemble::semantics;

namespace {

Hole H(std::string name, BaseType t) { return {std::move(name), t, std::nullopt}; }

SemanticForm OpenPut() {
  return Predicate("put", {HoleRef{"b"}, HoleRef{"v"}},
                   {H("b", BaseType::kEntity), H("v", BaseType::kLocation)});
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInternal;
}

}  // namespace

TEST_CASE("continuation combinators") {
  using R = int;
  auto m = cps::Pure<R, std::function<int(int)>>([](int x) { return x * 3; });
  auto n = cps::Pure<R, int>(7);
  CHECK(cps::Run<int>(cps::Apply<int, int, R>(m, n)) == 21);
  // n runs before m: the argument is evaluated first
  std::string order;
  cps::Comp<int, int> logged_n = [&](std::function<int(int)> k) { order += "n"; return k(2); };
  cps::Comp<std::function<int(int)>, int> logged_m = [&](std::function<int(std::function<int(int)>)> k) {
    order += "m";
    return k([](int x) { return x + 1; });
  };
  CHECK(cps::Run<int>(cps::Apply<int, int, int>(logged_m, logged_n)) == 3);
  CHECK(order == "nm");
}

TEST_CASE("types and printing") {
  SemanticForm put = OpenPut();
  CHECK(put.type().ToString() == "e -> loc -> t");
  CHECK(ToString(put) == "λb.λv.put(b,v)");
  SemanticForm on = SpliceHole(put, "v",
                               Predicate("on", {HoleRef{"w"}}, {H("w", BaseType::kLocation)},
                                         BaseType::kLocation));
  CHECK(ToString(on) == "λb.λw.put(b,on(w))");
  CHECK(TypeOf(EntityRef{"cup"}) == SemType(BaseType::kEntity));
  CHECK(TypeOf(Point{{1, 0, 2}}) == SemType(BaseType::kLocation));
  CHECK(TypeOf(Relation("on", Point{{0, 0, 0}})) == SemType(BaseType::kLocation));
  CHECK(KindOf([] { TypeOf(HoleRef{"x"}); }) == ErrorKind::kComposition);
  CHECK(ToString(Point{{0.2, 0, 1.5}}) == "(0.2,0,1.5)");
}

TEST_CASE("application fills the outermost hole of the argument's type") {
  SemanticForm put = OpenPut();
  SemanticForm a = CpsApply(put, Term{EntityRef{"plate"}});
  CHECK(ToString(a) == "λv.put(plate,v)");
  SemanticForm b = CpsApply(put, Term{Point{{1, 0, 1}}});
  CHECK(ToString(b) == "λb.put(b,(1,0,1))");
  // both orders meet in the same saturated form
  CHECK(CpsApply(a, Term{Point{{1, 0, 1}}}) == CpsApply(b, Term{EntityRef{"plate"}}));
  CHECK(IsSaturated(CpsApply(a, Term{Point{{1, 0, 1}}})));
  CHECK(KindOf([&] { CpsApply(Predicate("reach", {EntityRef{"x"}}), Term{EntityRef{"y"}}); }) ==
        ErrorKind::kArity);
}

TEST_CASE("same-typed holes fill in order") {
  SemanticForm f = Predicate("swap", {HoleRef{"x"}, HoleRef{"y"}},
                             {H("x", BaseType::kEntity), H("y", BaseType::kEntity)});
  SemanticForm g = CpsApply(CpsApply(f, Term{EntityRef{"a"}}), Term{EntityRef{"b"}});
  CHECK(ToString(g) == "swap(a,b)");
}

TEST_CASE("raising") {
  scene::DeixisTarget t{{0.5, 0, 1}, {"cup", "plate"}};
  CHECK(RaiseType(Indicated{t}, BaseType::kLocation).value == Term{Point{{0.5, 0, 1}}});
  CHECK(RaiseType(Indicated{t}, BaseType::kEntity).value == Term{EntityRef{"cup"}});
  CHECK(RaiseType(EntityRef{"cup"}, BaseType::kLocation).value == Term{PlaceOf{"cup"}});
  CHECK(RaiseType(PlaceOf{"cup"}, BaseType::kEntity).value == Term{EntityRef{"cup"}});
  CHECK(RaiseType(Point{{1, 0, 1}}, BaseType::kEntity).value == Term{RegionRef{{1, 0, 1}}});
  Raised r = RaiseType(Nest(Predicate("grasp", {EntityRef{"cup"}})), BaseType::kEntity);
  CHECK(r.value == Term{EntityRef{"cup"}});
  REQUIRE(r.preconditions.size() == 1);
  CHECK(r.preconditions[0] == Predicate("grasp", {EntityRef{"cup"}}));
  CHECK(KindOf([] { RaiseType(EntityRef{"cup"}, SemType::Arrow(BaseType::kEntity, BaseType::kTruth)); }) ==
        ErrorKind::kRaising);
  CHECK(KindOf([] { ApplyAt(OpenPut(), 5, EntityRef{"x"}); }) == ErrorKind::kArity);
}

TEST_CASE("binder validation") {
  SemanticForm bad = OpenPut();
  bad.holes.push_back(H("b", BaseType::kEntity));
  CHECK(KindOf([&] { Validate(bad); }) == ErrorKind::kValidation);
  CHECK(KindOf([] { Predicate("reach", {EntityRef{"x"}}, {H("z", BaseType::kEntity)}); }) ==
        ErrorKind::kValidation);
  CHECK_NOTHROW(Validate(OpenPut()));
}

TEST_CASE("hole position") {
  CHECK(OutermostHoleIsDirect(OpenPut()));
  SemanticForm nested = SpliceHole(CpsApply(OpenPut(), Term{EntityRef{"b1"}}), "v",
                                   Predicate("on", {HoleRef{"w"}}, {H("w", BaseType::kLocation)},
                                             BaseType::kLocation));
  CHECK_FALSE(OutermostHoleIsDirect(nested));
  CHECK(ToString(CpsApply(nested, Term{Point{{0.2, 0, 1.5}}})) == "put(b1,on((0.2,0,1.5)))");
}

TEST_CASE("preconditions") {
  const ActionTable& table = ActionTable::Default();
  SemanticForm grasp = Predicate("grasp", {EntityRef{"cup"}});
  SemanticForm out = SatisfyPrecondition(OpenPut(), grasp, table);
  CHECK(ToString(out) == "λv.put(cup,v)");
  REQUIRE(out.satisfied.size() == 1);
  CHECK(out.satisfied[0] == grasp);
  CHECK(SatisfyPrecondition(out, grasp, table) == out);
  CHECK(KindOf([&] { SatisfyPrecondition(out, Predicate("grasp", {EntityRef{"plate"}}), table); }) ==
        ErrorKind::kPreconditionMismatch);
  CHECK(KindOf([&] { SatisfyPrecondition(OpenPut(), Predicate("reach", {EntityRef{"cup"}}), table); }) ==
        ErrorKind::kPreconditionMismatch);
}

TEST_CASE("action table documents") {
  ActionTable t = LoadActionTable(R"({
    "actions": [{"name": "push", "slots": [{"name": "theme", "type": "e"}]}],
    "relations": [{"name": "under", "argument": "loc"}]})");
  REQUIRE(t.FindAction("push") != nullptr);
  CHECK(t.FindAction("push")->SlotIndex("theme") == 0);
  CHECK(t.FindAction("push")->SlotIndex("destination") == -1);
  CHECK(t.FindRelation("under") != nullptr);
  CHECK(t.FindAction("put") == nullptr);
  CHECK(KindOf([] { LoadActionTable(R"({"actions": [], "verbs": []})"); }) == ErrorKind::kSchema);
}

TEST_CASE("record matching") {
  SemanticForm put = CpsApply(CpsApply(OpenPut(), Term{EntityRef{"plate"}}),
                              Term{Point{{0.1 + 0.2, 0, 1.5}}});
  CHECK(MatchesRecord("put(plate,(0.3,0,1.5))", put));
  CHECK(MatchesRecord(" put( plate , (0.3, 0, 1.5) ) ", put));
  CHECK_FALSE(MatchesRecord("put(plate,(0.31,0,1.5))", put));
  CHECK_FALSE(MatchesRecord("put(cup,(0.3,0,1.5))", put));
  CHECK(MatchesRecord("λv.put(plate,v)", CpsApply(OpenPut(), Term{EntityRef{"plate"}})));
  CHECK(MatchesRecord("\\v.put(plate,v)", CpsApply(OpenPut(), Term{EntityRef{"plate"}})));
  CHECK(KindOf([&] { MatchesRecord("put(plate", put); }) == ErrorKind::kSchema);
}
