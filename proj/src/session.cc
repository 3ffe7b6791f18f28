#include "ensemble/session.h"

#include "ensemble/error.h"

namespace ensemble {

namespace {

std::string_view ConfusionKey(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownInput: return "confusion.unknown_input";
    case ErrorKind::kDeadInput: return "confusion.dead_input";
    case ErrorKind::kNoTarget: return "confusion.no_target";
    case ErrorKind::kValidation: return "confusion.unknown_input";
    default: return "confusion.generic";
  }
}

automaton::Machine MachineFor(const dialogue::Resources& resources,
                              automaton::Mode mode) {
  if (mode == automaton::Mode::kNpda) return *resources.machine;
  return automaton::Restrict(*resources.machine, mode);
}

}  // namespace

Session::Session(scene::Scene scene, const dialogue::Resources& resources,
                 SessionOptions options)
    : resources_(resources),
      machine_(MachineFor(resources, options.mode)),
      initial_scene_((scene::Validate(scene), scene)),
      env_(std::move(scene), resources_),
      config_(automaton::InitialConfiguration(machine_.start())),
      rng_(options.seed),
      seed_(options.seed) {
  config_.stack.back() = env_.Sanitize(config_.stack.back());
}

Turn Session::HandleTokens(const std::vector<InputToken>& tokens) {
  Turn turn;
  automaton::RunResult run =
      automaton::Run(machine_, config_, tokens, env_, rng_);
  config_ = std::move(run.config);
  for (auto& entry : run.trace) {
    if (auto* move = std::get_if<AgentMove>(&entry)) {
      turn.moves.push_back(std::move(*move));
    } else {
      auto& error = std::get<automaton::RunError>(entry);
      turn.moves.push_back({MoveKind::kConfusion,
                            env_.templates.Format(ConfusionKey(error.kind), {}),
                            std::nullopt, std::nullopt});
      turn.errors.push_back(std::move(error));
    }
  }
  return turn;
}

Turn Session::Handle(const InputEvent& event) {
  clock_ = std::max(clock_, event.time);
  std::vector<InputToken> tokens;
  Turn turn;
  try {
    Validate(event);
    tokens = ClassifyEvent(event, env_.lexicon);
  } catch (const Error& e) {
    turn.moves.push_back({MoveKind::kConfusion,
                          env_.templates.Format(ConfusionKey(e.kind()), {}),
                          std::nullopt, std::nullopt});
    Record(event, turn);
    return turn;
  }
  turn = HandleTokens(tokens);
  Record(event, turn);
  return turn;
}

void Session::Record(const InputEvent& event, const Turn&) {
  episode_events_.push_back(event);
}

dialogue::GestureLexiconEntry Session::LearnGesture(std::string shape_id) {
  std::vector<InputEvent> window = previous_episode_events_;
  window.insert(window.end(), episode_events_.begin(), episode_events_.end());
  auto entry = dialogue::LearnGesture(env_.gestures, std::move(shape_id), window,
                                      env_.scene, env_.lexicon, env_.actions,
                                      NextTime());
  previous_episode_events_.clear();
  episode_events_.clear();
  return entry;
}

void Session::Reset() {
  env_.scene = initial_scene_;
  config_ = automaton::InitialConfiguration(machine_.start());
  config_.stack.back() = env_.Sanitize(config_.stack.back());
  rng_.seed(seed_);
  previous_episode_events_ = std::move(episode_events_);
  episode_events_.clear();
}

}  // namespace ensemble
