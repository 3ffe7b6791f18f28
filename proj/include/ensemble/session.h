#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ensemble/automaton.h"
#include "ensemble/dialogue.h"
#include "ensemble/events.h"

namespace ensemble {

struct SessionOptions {
  automaton::Mode mode = automaton::Mode::kNpda;
  std::uint64_t seed = 0;
};

struct Turn {
  std::vector<AgentMove> moves;
  std::vector<automaton::RunError> errors;
};

// One dialogue with one human over one scene. Not thread-safe; a session is
// confined to a single thread at a time.
class Session {
 public:
  explicit Session(scene::Scene scene,
                   const dialogue::Resources& resources =
                       dialogue::Resources::Default(),
                   SessionOptions options = {});

  // Classifies and consumes one event. Failures become confusion moves.
  Turn Handle(const InputEvent& event);
  Turn HandleTokens(const std::vector<InputToken>& tokens);

  // Learns 'shape_id' from the human events of the current and previous
  // episode.
  dialogue::GestureLexiconEntry LearnGesture(std::string shape_id);

  // Restores the initial scene and configuration; learned gestures stay.
  void Reset();

  const automaton::Configuration& configuration() const { return config_; }
  void set_configuration(automaton::Configuration config) {
    config_ = std::move(config);
  }
  const scene::Scene& scene() const { return env_.scene; }
  dialogue::GestureLexicon& gestures() { return env_.gestures; }
  const automaton::Machine& machine() const { return machine_; }
  const dialogue::DialogueEnvironment& environment() const { return env_; }
  std::uint64_t NextTime() { return ++clock_; }

 private:
  void Record(const InputEvent& event, const Turn& turn);

  dialogue::Resources resources_;
  automaton::Machine machine_;
  scene::Scene initial_scene_;
  dialogue::DialogueEnvironment env_;
  automaton::Configuration config_;
  automaton::Rng rng_;
  std::uint64_t seed_;
  std::uint64_t clock_ = 0;
  std::vector<InputEvent> episode_events_;
  std::vector<InputEvent> previous_episode_events_;
};

}  // namespace ensemble
