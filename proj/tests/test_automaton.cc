#include <doctest.h>

#include <map>
#include <random>

#include "ensemble/automaton.h"
#include "ensemble/dialogue.h"
#include "ensemble/error.h"
#include "oracles.h"

using namespace ensemble;
using namespace ensemble::automaton;
using semantics::EntityRef;

namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInternal;
}

ContextFrame WithCandidates(int n) {
  ContextFrame f;
  for (int i = 0; i < n; ++i) f.candidates.push_back(EntityRef{"o" + std::to_string(i)});
  return f;
}

InputToken Token(Terminal t) { return {t, NounPhrase{}, 0}; }

}  // namespace

TEST_CASE("guards evaluate on the top frame") {
  ContextFrame f = WithCandidates(2);
  f.focus = "cup";
  f.origin_state = "InterpDeixis";
  CHECK(Guard::Parse("candidates > 1").Evaluate(f));
  CHECK_FALSE(Guard::Parse("candidates == 1").Evaluate(f));
  CHECK(Guard::Parse("focus && !indicated").Evaluate(f));
  CHECK(Guard::Parse("origin == InterpDeixis").Evaluate(f));
  CHECK(Guard::Parse("hole == none").Evaluate(f));
  CHECK(Guard().Evaluate(f));
  CHECK(Guard::Parse("true").IsTrivial());
  f.indicated = scene::DeixisTarget{{1, 0, 1}, {}};
  CHECK(Guard::Parse("in_region(1.2, 1, 0.3)").Evaluate(f));
  CHECK_FALSE(Guard::Parse("in_region(2, 1, 0.3)").Evaluate(f));
  f.pending_form = semantics::Predicate("put", {semantics::HoleRef{"b"}, semantics::HoleRef{"v"}},
                                        {{"b", semantics::BaseType::kEntity, std::nullopt},
                                         {"v", semantics::BaseType::kLocation, std::nullopt}});
  CHECK(HoleFeature(f) == "entity");
  CHECK(Guard::Parse("pending && hole == entity && hole_direct").Evaluate(f));
  CHECK(KindOf([] { Guard::Parse("candidates >> 1"); }) == ErrorKind::kSchema);
  CHECK(KindOf([] { Guard::Parse("mood == happy"); }) == ErrorKind::kSchema);
}

TEST_CASE("guard exclusivity") {
  auto ex = [](const char* a, const char* b) { return Exclusive(Guard::Parse(a), Guard::Parse(b)); };
  CHECK(ex("candidates > 1", "candidates == 1"));
  CHECK(ex("candidates >= 2", "candidates < 2"));
  CHECK_FALSE(ex("candidates > 1", "candidates > 2"));
  CHECK(ex("focus", "!focus"));
  CHECK(ex("hole == entity", "hole == location"));
  CHECK(ex("origin == A", "origin != A"));
  CHECK_FALSE(ex("origin != A", "origin != B"));
  CHECK(ex("focus && candidates == 0", "candidates > 0"));
  CHECK_FALSE(ex("true", "focus"));
}

TEST_CASE("guard exclusivity is sound on sampled frames") {
  const std::vector<std::string> atoms = {"candidates == 0", "candidates > 1", "candidates <= 1",
                                          "focus",           "!focus",         "indicated",
                                          "!indicated",      "hole == none",   "hole != none",
                                          "origin == A",     "origin != A"};
  std::mt19937_64 rng(4);
  std::vector<ContextFrame> frames;
  for (int i = 0; i < 200; ++i) {
    ContextFrame f = WithCandidates(static_cast<int>(rng() % 4));
    if (rng() % 2) f.focus = "x";
    if (rng() % 2) f.indicated = scene::DeixisTarget{};
    f.origin_state = rng() % 2 ? "A" : "B";
    if (rng() % 2) f.pending_form = semantics::Predicate("reach", {EntityRef{"x"}});
    frames.push_back(f);
  }
  for (int i = 0; i < 300; ++i) {
    std::string a = atoms[rng() % atoms.size()] + " && " + atoms[rng() % atoms.size()];
    std::string b = atoms[rng() % atoms.size()];
    if (!Exclusive(Guard::Parse(a), Guard::Parse(b))) continue;
    for (const auto& f : frames) {
      CHECK_FALSE((Guard::Parse(a).Evaluate(f) && Guard::Parse(b).Evaluate(f)));
    }
  }
}

TEST_CASE("stack operations") {
  Configuration c = InitialConfiguration("S");
  CHECK(c.stack.size() == 1);
  CHECK(c.history.size() == 1);
  CHECK(KindOf([&] { ExecStackOp(c, StackOperation::Pop()); }) == ErrorKind::kStackUnderflow);

  ContextFrame held;
  held.held = {"cup"};
  Configuration d = ExecStackOp(c, StackOperation::Rewrite(held));
  d = ExecStackOp(d, StackOperation::Push(WithCandidates(2)));
  CHECK(d.stack.size() == 2);
  Configuration flushed = ExecStackOp(d, StackOperation::Flush());
  CHECK(flushed.stack.size() == 1);
  CHECK(flushed.stack[0].held == std::set<std::string>{"cup"});
  CHECK(flushed.history.empty());

  // a lone bottom frame with candidates advances instead of underflowing
  Configuration lone = ExecStackOp(c, StackOperation::Rewrite(WithCandidates(2)));
  Configuration advanced = ExecStackOp(lone, StackOperation::Pop());
  REQUIRE(advanced.stack.size() == 1);
  CHECK(advanced.stack[0].candidates == std::vector<semantics::Term>{EntityRef{"o1"}});
}

TEST_CASE("popuntil returns to the frame seen on the last visit") {
  Configuration c = InitialConfiguration("Idle");
  ContextFrame a;
  a.focus = "block";
  c = ExecStackOp(c, StackOperation::Rewrite(a));
  c.history.push_back({"InterpDeixis", a});
  ContextFrame pushed = WithCandidates(3);
  pushed.held = {"cup"};
  c = ExecStackOp(c, StackOperation::Push(pushed));
  c = ExecStackOp(c, StackOperation::Push(WithCandidates(1)));
  Configuration back = ExecStackOp(c, StackOperation::PopUntil("InterpDeixis"));
  REQUIRE(back.stack.size() == 1);
  CHECK(back.stack[0].focus == "block");
  CHECK(back.stack[0].held == std::set<std::string>{"cup"});
  CHECK(ExecStackOp(c, StackOperation::PopUntil("Nowhere")) ==
        ExecStackOp(c, StackOperation::Flush()));
}

TEST_CASE("mode restrictions") {
  const char* two_rules = R"({"start": "A", "states": ["A", "B"], "transitions": [
    {"from": "A", "input": "N", "to": "B"},
    {"from": "A", "input": "N", "to": "A", "weight": 0.5}]})";
  Machine m = LoadMachine(two_rules);
  CHECK_NOTHROW(Restrict(m, Mode::kNfa));
  try {
    Restrict(m, Mode::kDfa);
    FAIL("accepted two rules on one input");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMode);
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
  CHECK(KindOf([&] { Restrict(m, Mode::kDpda); }) == ErrorKind::kMode);

  Machine stack = LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "N", "to": "A", "op": "flush"}]})");
  CHECK(KindOf([&] { Restrict(stack, Mode::kNfa); }) == ErrorKind::kMode);
  CHECK_NOTHROW(Restrict(stack, Mode::kDpda));

  Machine epsilon = LoadMachine(R"({"start": "A", "states": ["A", "B"], "transitions": [
    {"from": "A", "input": "ε", "to": "B"}]})");
  CHECK(KindOf([&] { Restrict(epsilon, Mode::kDfa); }) == ErrorKind::kMode);
}

TEST_CASE("the interaction machine is deterministic") {
  Machine m = dialogue::BuildInteractionMachine();
  CHECK_NOTHROW(Restrict(m, Mode::kDpda));
  CHECK(KindOf([&] { Restrict(m, Mode::kNfa); }) == ErrorKind::kMode);
  CHECK(m.start() == "Idle");
}

TEST_CASE("machine documents") {
  CHECK(KindOf([] { LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "N", "to": "Z"}]})"); }) == ErrorKind::kSchema);
  CHECK(KindOf([] { LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "N", "to": "A", "weight": 1.5}]})"); }) == ErrorKind::kSchema);
  CHECK(KindOf([] { LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "N", "to": "A", "op": "rewrite", "compose": "missing"}]})"); }) ==
        ErrorKind::kSchema);
  CHECK(KindOf([] { LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "Q", "to": "A"}]})"); }) == ErrorKind::kSchema);
}

TEST_CASE("deterministic step takes the heaviest passing rule") {
  Machine m = LoadMachine(R"({"start": "A", "states": ["A", "B", "C"], "transitions": [
    {"from": "A", "input": "N", "to": "B", "weight": 0.25},
    {"from": "A", "input": "N", "to": "C", "weight": 0.75},
    {"from": "B", "input": "N", "guard": "focus", "to": "A"}]})");
  NullEnvironment env;
  Rng rng(0);
  Configuration c = InitialConfiguration("A");
  InputToken n = Token(Terminal::kNoun);
  // NPDA samples; count outcomes against the weights
  std::map<std::string, int> hits;
  for (int i = 0; i < 4000; ++i) hits[Step(m, c, &n, env, rng).config.state]++;
  CHECK(hits["C"] == doctest::Approx(3000).epsilon(0.06));
  CHECK(hits["B"] == doctest::Approx(1000).epsilon(0.15));
  // guard blocks the only rule out of B
  Configuration b = c;
  b.state = "B";
  CHECK(KindOf([&] { Step(m, b, &n, env, rng); }) == ErrorKind::kDeadInput);
  // history gets a snapshot per transition
  StepResult r = Step(m, c, &n, env, rng);
  CHECK(r.config.history.size() == c.history.size() + 1);
  CHECK(r.config.history.back().state == r.config.state);
}

TEST_CASE("epsilon loops are cut off") {
  Machine m = LoadMachine(R"({"start": "A", "states": ["A", "B"], "transitions": [
    {"from": "A", "input": "N", "to": "B"},
    {"from": "B", "input": "ε", "to": "B", "emit": "ack:x"}]})");
  NullEnvironment env;
  Rng rng(0);
  RunResult r = Run(m, InitialConfiguration("A"), {Token(Terminal::kNoun)}, env, rng);
  bool cut = false;
  int acks = 0;
  for (const auto& e : r.trace) {
    if (const auto* err = std::get_if<RunError>(&e)) cut = cut || err->kind == ErrorKind::kEpsilonBudget;
    acks += std::holds_alternative<AgentMove>(e);
  }
  CHECK(cut);
  CHECK(acks == kEpsilonBudget);
}

TEST_CASE("run keeps going after a dead input") {
  Machine m = LoadMachine(R"({"start": "A", "states": ["A"], "transitions": [
    {"from": "A", "input": "N", "to": "A", "emit": "ack:x"}]})");
  NullEnvironment env;
  Rng rng(0);
  RunResult r = Run(m, InitialConfiguration("A"),
                    {Token(Terminal::kVerb), Token(Terminal::kNoun)}, env, rng);
  REQUIRE(r.trace.size() == 2);
  CHECK(std::get<RunError>(r.trace[0]).kind == ErrorKind::kDeadInput);
  CHECK(std::get<RunError>(r.trace[0]).token_index == 0);
  CHECK(std::holds_alternative<AgentMove>(r.trace[1]));
}

TEST_CASE("finite-state reachability against subset construction") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto fm = oracle::RandomMachine(rng, false);
    Machine m = Restrict(oracle::ToEngine(fm), Mode::kNfa);
    auto input = oracle::RandomString(rng, 10);
    std::vector<std::set<std::string>> got = {EpsilonClosure(m, {m.start()})};
    for (Terminal t : input) got.push_back(Successors(m, got.back(), t));
    CHECK(got == oracle::SubsetTrajectory(fm, input));
  }
}
