#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ensemble/dialogue.h"
#include "ensemble/scene.h"
#include "ensemble/session.h"

namespace ensemble {

struct ServiceOptions {
  bool stack_debug = false;
  SessionOptions session;
};

// WebSocket session service. Each connection gets its own Session over a
// copy of the scene, served on its own thread in message order.
class Service {
 public:
  Service(scene::Scene scene, dialogue::Resources resources,
          ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds 127.0.0.1:'port' (0 picks a free port) and starts accepting.
  // Returns the bound port. Throws Error(kInternal) on bind failure.
  std::uint16_t Start(std::uint16_t port, const std::string& address = "127.0.0.1");
  void Stop();
  // Blocks until Stop() is called from another thread.
  void Wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Handles one decoded client message for a session and returns the frames
// to send back. Used by the service and directly testable without sockets.
std::vector<nlohmann::json> HandleMessage(Session& session,
                                          const std::string& text,
                                          std::uint64_t& seq,
                                          bool stack_debug);

}  // namespace ensemble
