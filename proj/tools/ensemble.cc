// ensemble: command-line front end for the dialogue engine.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "ensemble/error.h"
#include "ensemble/fuzz.h"
#include "ensemble/serialize.h"
#include "ensemble/service.h"
#include "ensemble/session.h"
#include "ensemble/trace.h"
#include "ensemble/wire.h"

namespace {

using namespace ensemble;

struct LexiconFiles {
  std::string load;
  std::string save;

  void Load(Session& session) const {
    if (load.empty()) return;
    session.gestures() = dialogue::GestureLexicon::Load(load);
  }
  void Save(Session& session) const {
    if (!save.empty()) session.gestures().Save(save);
  }
};

scene::Scene SceneOrDefault(const std::string& path) {
  return path.empty() ? fuzz::DefaultScene() : scene::LoadSceneFile(path);
}

int RunTrace(const std::string& scene_path, const std::string& trace_path,
             automaton::Mode mode, std::uint64_t seed, const LexiconFiles& lexicon) {
  scene::Scene scene = scene::LoadSceneFile(scene_path);
  auto records = trace::LoadTraceFile(trace_path);
  Session session(std::move(scene), dialogue::Resources::Default(), {mode, seed});
  lexicon.Load(session);
  trace::ReplayResult result = trace::Replay(session, records, std::cout);
  for (const auto& m : result.mismatches) std::cerr << "mismatch: " << m << '\n';
  if (result.confusions > 0) std::cerr << result.confusions << " confusion move(s)\n";
  if (result.errors > 0) std::cerr << result.errors << " engine error(s)\n";
  lexicon.Save(session);
  return result.exit_code;
}

void PrintTurn(const std::vector<AgentMove>& moves) {
  for (const auto& m : moves) std::cout << "  " << ToString(m) << '\n';
}

// Lines are utterances unless they start with ':'.
int Repl(const std::string& scene_path, automaton::Mode mode, std::uint64_t seed,
         const LexiconFiles& lexicon) {
  Session session(SceneOrDefault(scene_path), dialogue::Resources::Default(), {mode, seed});
  lexicon.Load(session);
  std::cout << "commands: :click x z | :point ox oy oz dx dy dz | :shape ID | :motion ID\n"
               "          :yes | :no | :learn ID | :reset | :stack | :scene | :quit\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty()) continue;
    wire::ClientMessage message;
    if (line[0] != ':') {
      message.body = wire::UtteranceMessage{line};
    } else {
      std::istringstream in(line.substr(1));
      std::string cmd;
      in >> cmd;
      if (cmd == "quit" || cmd == "q") break;
      if (cmd == "stack") {
        std::cout << wire::StackDebugFrame(0, session.configuration()).dump(2) << '\n';
        continue;
      }
      if (cmd == "scene") {
        std::cout << wire::SceneStateFrame(0, session.scene()).dump(2) << '\n';
        continue;
      }
      if (cmd == "click") {
        wire::DeixisClickMessage click;
        in >> click.x >> click.z;
        message.body = click;
      } else if (cmd == "point") {
        wire::DeixisMessage d;
        in >> d.origin.x >> d.origin.y >> d.origin.z >> d.direction.x >> d.direction.y >>
            d.direction.z;
        message.body = d;
      } else if (cmd == "shape" || cmd == "motion" || cmd == "learn") {
        std::string id;
        in >> id;
        if (cmd == "shape") message.body = wire::GestureMessage{StaticIconicGesture{id}};
        if (cmd == "motion") message.body = wire::GestureMessage{DynamicIconicGesture{id}};
        if (cmd == "learn") message.body = wire::LearnGestureMessage{id};
      } else if (cmd == "yes" || cmd == "no") {
        message.body = wire::GestureMessage{HeadGesture{cmd == "yes"}};
      } else if (cmd == "reset") {
        message.body = wire::ResetMessage{};
      } else {
        std::cout << "unknown command\n";
        continue;
      }
      if (in.fail()) {
        std::cout << "bad arguments\n";
        continue;
      }
    }
    if (const auto* learn = std::get_if<wire::LearnGestureMessage>(&message.body)) {
      try {
        auto entry = session.LearnGesture(learn->shape_id);
        std::cout << "  learned " << entry.shape_id << " = "
                  << semantics::ToString(entry.bound_form) << '\n';
      } catch (const Error& e) {
        std::cout << "  " << e.what() << '\n';
      }
      continue;
    }
    if (std::holds_alternative<wire::ResetMessage>(message.body)) {
      session.Reset();
      continue;
    }
    auto event = wire::ToInputEvent(message, session.scene(), session.NextTime());
    PrintTurn(session.Handle(*event).moves);
  }
  lexicon.Save(session);
  return 0;
}

std::atomic<Service*> g_service{nullptr};

extern "C" void StopOnSignal(int) {
  if (Service* s = g_service.load()) {
    std::thread([s] { s->Stop(); }).detach();
  }
}

int Serve(std::uint16_t port, const std::string& scene_path, bool stack_debug,
          automaton::Mode mode, std::uint64_t seed) {
  Service service(SceneOrDefault(scene_path), dialogue::Resources::Default(),
                  {stack_debug, {mode, seed}});
  std::uint16_t bound = service.Start(port);
  std::cout << "listening on ws://127.0.0.1:" << bound << std::endl;
  g_service = &service;
  std::signal(SIGINT, StopOnSignal);
  std::signal(SIGTERM, StopOnSignal);
  service.Wait();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal dialogue engine"};
  app.require_subcommand(1);

  LexiconFiles lexicon;
  app.add_option("--load-lexicon", lexicon.load, "Gesture lexicon to start from");
  app.add_option("--save-lexicon", lexicon.save, "Write the gesture lexicon on exit");

  std::map<std::string, automaton::Mode> modes = {{"npda", automaton::Mode::kNpda},
                                                  {"dpda", automaton::Mode::kDpda},
                                                  {"nfa", automaton::Mode::kNfa},
                                                  {"dfa", automaton::Mode::kDfa}};
  automaton::Mode mode = automaton::Mode::kNpda;
  std::uint64_t seed = 0;
  std::string scene_path;

  auto* run = app.add_subcommand("run", "Replay a trace file");
  std::string trace_path;
  run->add_option("--scene", scene_path)->required()->check(CLI::ExistingFile);
  run->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  run->add_option("--mode", mode)->transform(CLI::CheckedTransformer(modes));
  run->add_option("--seed", seed);

  auto* repl = app.add_subcommand("repl", "Interactive session on stdin");
  repl->add_option("--scene", scene_path)->check(CLI::ExistingFile);
  repl->add_option("--mode", mode)->transform(CLI::CheckedTransformer(modes));
  repl->add_option("--seed", seed);

  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run sampled grammatical sequences");
  fuzz::FuzzOptions fuzz_options;
  bool strict = false;
  fuzz_cmd->add_option("--max-len", fuzz_options.max_len);
  fuzz_cmd->add_option("--count", fuzz_options.count);
  fuzz_cmd->add_option("--seed", fuzz_options.seed);
  fuzz_cmd->add_option("--scene", scene_path)->check(CLI::ExistingFile);
  fuzz_cmd->add_flag("--strict", strict, "Exit 1 on dead input or invariant violations");

  auto* serve = app.add_subcommand("serve", "WebSocket session service");
  std::uint16_t port = 8765;
  bool stack_debug = false;
  serve->add_option("--port", port);
  serve->add_option("--scene", scene_path)->check(CLI::ExistingFile);
  serve->add_option("--mode", mode)->transform(CLI::CheckedTransformer(modes));
  serve->add_option("--seed", seed);
  serve->add_flag("--stack-debug", stack_debug, "Send stack_debug frames");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return RunTrace(scene_path, trace_path, mode, seed, lexicon);
    if (*repl) return Repl(scene_path, mode, seed, lexicon);
    if (*serve) return Serve(port, scene_path, stack_debug, mode, seed);
    if (*fuzz_cmd) {
      fuzz::FuzzReport report = fuzz::Fuzz(fuzz_options, SceneOrDefault(scene_path));
      std::cout << fuzz::FormatReport(report);
      bool bad = report.dead_input_errors > 0 || report.invariant_violations > 0;
      return strict && bad ? 1 : 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
