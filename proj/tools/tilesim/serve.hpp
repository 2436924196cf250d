/*
 * Copyright 2026 The tilesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file serve.hpp
 * @brief HTTP and WebSocket front end over one host session.
 *
 *   GET  /api/modules      descriptor list
 *   GET  /api/status       connection and stream state
 *   POST /api/triggers     one trigger specification
 *   POST /api/collection   {"action": "start"|"stop", "modules": [ids] | "all"}
 *   POST /api/run          leave the configuration phase
 *   WS   /ws/events        every merged trace event as one JSON text message
 *
 * Control requests go through one mutex, so they reach the simulator in
 * arrival order. Events are merged once and kept; every WebSocket client
 * replays the same history from the first event, so all clients see the
 * same sequence however late they connect.
 */
#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/host/session.hpp"

namespace tilesim::cli {

struct ServeOptions {
  std::string sim_host = "127.0.0.1";
  std::uint16_t sim_port = 0;
  std::string http_host = "127.0.0.1";
  std::uint16_t http_port = 0;  // 0 picks a free port
};

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

/// Session state and request handling, independent of the transport.
class DebugService {
 public:
  explicit DebugService(ServeOptions options) : options_(std::move(options)) {}
  ~DebugService();

  HttpReply handle(const std::string& method, const std::string& target, const std::string& body);

  /// Blocks until event `index` exists (returns true) or the stream ended
  /// without it, or stop() was called (returns false).
  bool wait_event(std::size_t index, std::string& out);
  void stop();

 private:
  bool ensure_session();
  bool is_running();
  HttpReply modules();
  HttpReply status();
  HttpReply triggers(const std::string& body);
  HttpReply collection(const std::string& body);
  HttpReply run();
  void pump();

  ServeOptions options_;
  std::mutex control_mu_;  // serializes control requests

  std::mutex mu_;
  std::condition_variable cv_;
  std::unique_ptr<host::Session> session_;
  std::vector<debug::ModuleDescriptor> modules_;
  bool running_ = false;
  bool ended_ = false;
  bool stopping_ = false;
  std::string stream_error_;
  std::vector<std::string> history_;
  std::thread pump_;
};

/// Blocking HTTP server; serve() returns after stop().
class HttpServer {
 public:
  explicit HttpServer(ServeOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  std::uint16_t port() const;
  void serve();
  void stop();
  DebugService& service() { return service_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  DebugService service_;
};

}  // namespace tilesim::cli
