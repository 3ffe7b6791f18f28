#include "ensemble/service.h"

#include <condition_variable>
#include <list>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "ensemble/error.h"
#include "ensemble/wire.h"

namespace ensemble {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

std::vector<json> HandleMessage(Session& session, const std::string& text,
                                std::uint64_t& seq, bool stack_debug) {
  std::vector<json> frames;
  wire::ClientMessage message;
  try {
    message = wire::ParseClientMessage(json::parse(text));
  } catch (const json::exception& e) {
    frames.push_back(wire::ErrorFrame(++seq, std::string("malformed message: ") + e.what()));
    return frames;
  } catch (const Error& e) {
    frames.push_back(wire::ErrorFrame(++seq, e.what()));
    return frames;
  }

  if (const auto* learn = std::get_if<wire::LearnGestureMessage>(&message.body)) {
    try {
      auto entry = session.LearnGesture(learn->shape_id);
      AgentMove ack{MoveKind::kAck, session.environment().templates.Format("ack.ok", {}),
                    std::nullopt, std::nullopt};
      frames.push_back(wire::AgentMoveFrame(++seq, ack));
      (void)entry;
    } catch (const Error& e) {
      frames.push_back(wire::ErrorFrame(++seq, e.what()));
      return frames;
    }
  } else if (std::holds_alternative<wire::ResetMessage>(message.body)) {
    session.Reset();
  } else {
    auto event = wire::ToInputEvent(message, session.scene(), session.NextTime());
    Turn turn = session.Handle(*event);
    for (const auto& move : turn.moves) frames.push_back(wire::AgentMoveFrame(++seq, move));
  }
  frames.push_back(wire::SceneStateFrame(++seq, session.scene()));
  if (stack_debug) frames.push_back(wire::StackDebugFrame(++seq, session.configuration()));
  return frames;
}

struct Service::Impl {
  scene::Scene scene;
  dialogue::Resources resources;
  ServiceOptions options;

  asio::io_context io;
  std::unique_ptr<tcp::acceptor> acceptor;
  std::thread accept_thread;

  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  std::list<std::shared_ptr<tcp::socket>> sockets;
  std::vector<std::thread> workers;

  void Serve(std::shared_ptr<tcp::socket> socket) {
    try {
      websocket::stream<tcp::socket&> ws(*socket);
      ws.accept();
      Session session(scene, resources, options.session);
      std::uint64_t seq = 0;
      for (;;) {
        beast::flat_buffer buffer;
        ws.read(buffer);
        std::string text = beast::buffers_to_string(buffer.data());
        for (const auto& frame : HandleMessage(session, text, seq, options.stack_debug)) {
          ws.text(true);
          ws.write(asio::buffer(frame.dump()));
        }
      }
    } catch (const std::exception&) {
      // closed by the peer or by Stop()
    }
  }

  void AcceptLoop() {
    for (;;) {
      auto socket = std::make_shared<tcp::socket>(io);
      boost::system::error_code ec;
      acceptor->accept(*socket, ec);
      std::lock_guard lock(mutex);
      if (stopped) return;
      if (ec) continue;
      sockets.push_back(socket);
      workers.emplace_back([this, socket] { Serve(socket); });
    }
  }
};

Service::Service(scene::Scene scene, dialogue::Resources resources,
                 ServiceOptions options)
    : impl_(std::make_unique<Impl>()) {
  scene::Validate(scene);
  impl_->scene = std::move(scene);
  impl_->resources = std::move(resources);
  impl_->options = options;
}

Service::~Service() { Stop(); }

std::uint16_t Service::Start(std::uint16_t port, const std::string& address) {
  try {
    tcp::endpoint endpoint(asio::ip::make_address(address), port);
    impl_->acceptor = std::make_unique<tcp::acceptor>(impl_->io);
    impl_->acceptor->open(endpoint.protocol());
    impl_->acceptor->set_option(asio::socket_base::reuse_address(true));
    impl_->acceptor->bind(endpoint);
    impl_->acceptor->listen();
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorKind::kInternal, "cannot listen on " + address + ":" +
                                          std::to_string(port) + ": " + e.what());
  }
  std::uint16_t bound = impl_->acceptor->local_endpoint().port();
  impl_->accept_thread = std::thread([this] { impl_->AcceptLoop(); });
  return bound;
}

void Service::Stop() {
  if (!impl_ || !impl_->acceptor) return;
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  // A blocking accept does not notice close(); wake it with a connection.
  boost::system::error_code ec;
  {
    tcp::socket poke(impl_->io);
    poke.connect(impl_->acceptor->local_endpoint(ec), ec);
  }
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  impl_->acceptor->close(ec);
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& s : impl_->sockets) {
      s->shutdown(tcp::socket::shutdown_both, ec);
    }
  }
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
  impl_->stopped_cv.notify_all();
}

void Service::Wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

}  // namespace ensemble
