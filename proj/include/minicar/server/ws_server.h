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


#ifndef MINICAR_SERVER_WS_SERVER_H_
#define MINICAR_SERVER_WS_SERVER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "minicar/sim/session.h"

namespace minicar {

inline constexpr int kProtocolVersion = 1;

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  // Broadcast every n-th telemetry record. Events are never skipped.
  int telemetry_every = 1;
  std::size_t mailbox_capacity = 1024;
  // Per-client outbound frames; telemetry beyond this is dropped.
  std::size_t client_queue = 256;
  // Stop after this much simulated time (tests, scripted runs).
  std::optional<double> max_sim_time;
};

// Port from MINICAR_PORT when set and valid, otherwise 8765.
std::uint16_t DefaultPort();

// WebSocket front end for a Session. Run() owns the simulation loop on the
// calling thread; a network thread accepts clients, feeds their messages
// into a bounded mailbox, and writes replies and broadcasts.
class WsServer {
 public:
  WsServer(Session& session, ServerOptions options);
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  // Binds and listens. Returns the bound port.
  std::uint16_t Listen();
  // Runs until Stop() or max_sim_time. Calls Listen() if needed.
  void Run();
  // Thread safe.
  void Stop();

  std::size_t client_count() const;

 private:
  friend class WsClient;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace minicar

#endif  // MINICAR_SERVER_WS_SERVER_H_
