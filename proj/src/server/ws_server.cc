/*
 * Copyright 2026 The Minicar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "minicar/server/ws_server.h"

#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace minicar {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::uint16_t DefaultPort() {
  if (const char* env = std::getenv("MINICAR_PORT")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 65536) return static_cast<std::uint16_t>(v);
  }
  return 8765;
}

namespace {

struct Inbound {
  int client;
  std::string text;
  bool left = false;
};

class Mailbox {
 public:
  explicit Mailbox(std::size_t capacity) : capacity_(capacity) {}

  // Disconnect notices are always accepted.
  bool Push(Inbound msg) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!msg.left && queue_.size() >= capacity_) return false;
    queue_.push_back(std::move(msg));
    return true;
  }

  std::deque<Inbound> Drain() {
    std::lock_guard<std::mutex> lock(mu_);
    std::deque<Inbound> out;
    out.swap(queue_);
    return out;
  }

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::deque<Inbound> queue_;
};

}  // namespace

class WsClient;

struct WsServer::Impl {
  Impl(Session& s, ServerOptions o) : session(s), options(o), mailbox(o.mailbox_capacity) {}

  void Accept();
  void Register(const std::shared_ptr<WsClient>& c);
  void Unregister(int id);
  std::vector<std::shared_ptr<WsClient>> Snapshot();
  void Broadcast(const std::string& text, bool droppable);
  void Send(int client, const std::string& text);

  Session& session;
  ServerOptions options;
  Mailbox mailbox;
  net::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread io_thread;
  std::atomic<bool> stop{false};
  std::atomic<int> next_id{1};
  mutable std::mutex clients_mu;
  std::map<int, std::weak_ptr<WsClient>> clients;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
};

class WsClient : public std::enable_shared_from_this<WsClient> {
 public:
  WsClient(tcp::socket socket, WsServer::Impl& server, int id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  int id() const { return id_; }

  void Start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->OnAccept(ec); });
  }

  // Safe from any thread.
  void Send(std::shared_ptr<const std::string> text, bool droppable) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text, droppable] {
      if (self->closed_) return;
      if (droppable && self->queue_.size() >= self->server_.options.client_queue) return;
      self->queue_.push_back(text);
      if (self->queue_.size() == 1) self->DoWrite();
    });
  }

  void Close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
      beast::get_lowest_layer(self->ws_).close();
    });
  }

 private:
  void OnAccept(beast::error_code ec) {
    if (ec) return;
    server_.Register(shared_from_this());
    Json hello = {{"type", "hello"},
                  {"protocol_version", kProtocolVersion},
                  {"client_id", id_}};
    Send(std::make_shared<const std::string>(hello.dump()), false);
    DoRead();
  }

  void DoRead() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->OnRead(ec);
    });
  }

  void OnRead(beast::error_code ec) {
    if (ec) {
      closed_ = true;
      queue_.clear();
      server_.Unregister(id_);
      return;
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (!server_.mailbox.Push({id_, std::move(text)})) {
      const Json err = {{"type", "err"}, {"ref", nullptr}, {"detail", "mailbox full; message dropped"}};
      Send(std::make_shared<const std::string>(err.dump()), false);
    }
    DoRead();
  }

  void DoWrite() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->queue_.clear();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->DoWrite();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  WsServer::Impl& server_;
  int id_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool closed_ = false;
};

void WsServer::Impl::Accept() {
  acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<WsClient>(std::move(socket), *this, next_id++)->Start();
    Accept();
  });
}

void WsServer::Impl::Register(const std::shared_ptr<WsClient>& c) {
  std::lock_guard<std::mutex> lock(clients_mu);
  clients[c->id()] = c;
}

void WsServer::Impl::Unregister(int id) {
  {
    std::lock_guard<std::mutex> lock(clients_mu);
    clients.erase(id);
  }
  mailbox.Push({id, {}, true});
}

std::vector<std::shared_ptr<WsClient>> WsServer::Impl::Snapshot() {
  std::lock_guard<std::mutex> lock(clients_mu);
  std::vector<std::shared_ptr<WsClient>> out;
  for (auto& [id, weak] : clients) {
    if (auto c = weak.lock()) out.push_back(std::move(c));
  }
  return out;
}

void WsServer::Impl::Broadcast(const std::string& text, bool droppable) {
  auto shared = std::make_shared<const std::string>(text);
  for (auto& c : Snapshot()) c->Send(shared, droppable);
}

void WsServer::Impl::Send(int client, const std::string& text) {
  std::shared_ptr<WsClient> target;
  {
    std::lock_guard<std::mutex> lock(clients_mu);
    auto it = clients.find(client);
    if (it != clients.end()) target = it->second.lock();
  }
  if (target) target->Send(std::make_shared<const std::string>(text), false);
}

WsServer::WsServer(Session& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, options)) {
  if (options.telemetry_every < 1) impl_->options.telemetry_every = 1;
}

WsServer::~WsServer() {
  Stop();
  if (impl_->io_thread.joinable()) impl_->io_thread.join();
}

std::uint16_t WsServer::Listen() {
  if (impl_->acceptor) return impl_->acceptor->local_endpoint().port();
  const tcp::endpoint ep(net::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.emplace(impl_->ioc);
  impl_->acceptor->open(ep.protocol());
  impl_->acceptor->set_option(net::socket_base::reuse_address(true));
  impl_->acceptor->bind(ep);
  impl_->acceptor->listen(net::socket_base::max_listen_connections);
  impl_->work.emplace(impl_->ioc.get_executor());
  impl_->Accept();
  impl_->io_thread = std::thread([this] { impl_->ioc.run(); });
  return impl_->acceptor->local_endpoint().port();
}

void WsServer::Stop() {
  if (impl_->stop.exchange(true)) return;
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    if (impl_->acceptor) impl_->acceptor->close(ec);
    for (auto& c : impl_->Snapshot()) c->Close();
    impl_->work.reset();
  });
}

std::size_t WsServer::client_count() const {
  std::lock_guard<std::mutex> lock(impl_->clients_mu);
  return impl_->clients.size();
}

void WsServer::Run() {
  Listen();
  Session& session = impl_->session;
  Pacer pacer(session.config().realtime_factor);
  pacer.Restart(session.sim().sim_time());
  std::int64_t records = 0;
  while (!impl_->stop.load()) {
    for (Inbound& in : impl_->mailbox.Drain()) {
      if (in.left) {
        session.ClientLeft(in.client);
        continue;
      }
      const double before = session.sim().sim_time();
      const Json reply = session.HandleText(in.text, in.client);
      impl_->Send(in.client, reply.dump());
      if (session.sim().sim_time() < before) pacer.Restart(session.sim().sim_time());
    }
    Session::TickOutput out = session.Tick();
    for (const Json& e : out.events) impl_->Broadcast(e.dump(), false);
    if (out.telemetry.is_null()) {
      // Frozen after a fault: keep serving messages until a reset.
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      pacer.Restart(session.sim().sim_time());
      continue;
    }
    if (records++ % impl_->options.telemetry_every == 0) {
      impl_->Broadcast(out.telemetry.dump(), true);
    }
    if (impl_->options.max_sim_time && session.sim().sim_time() >= *impl_->options.max_sim_time) {
      break;
    }
    pacer.Wait(session.sim().sim_time());
  }
  Stop();
}

}  // namespace minicar
