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
 * @file session.hpp
 * @brief Host session over one ordered byte channel to the external interface.
 *
 * A background reader splits the stream into control replies and trace
 * items. One thread may issue control calls while another reads events.
 */
#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tilesim/daemon/channel.hpp"
#include "tilesim/debug/packet.hpp"
#include "tilesim/debug/trigger.hpp"
#include "tilesim/host/decode.hpp"

namespace tilesim::host {

class Timeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NackTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoSuchModule : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using debug::TypeMismatch;

/// An event, or a watermark: all events stamped below `mark` were delivered.
struct StreamItem {
  std::optional<TraceEvent> event;
  std::uint32_t mark = 0;
};

class Session {
 public:
  struct Options {
    std::chrono::milliseconds control_timeout{5000};
    std::chrono::milliseconds event_timeout{1000};
  };

  static std::unique_ptr<Session> open(std::unique_ptr<daemon::ByteChannel> channel, Options options);
  static std::unique_ptr<Session> open(std::unique_ptr<daemon::ByteChannel> channel) {
    return open(std::move(channel), Options{});
  }
  /// Throws daemon::ConnectionRefused or daemon::HandshakeTimeout.
  static std::unique_ptr<Session> connect_tcp(const std::string& host, std::uint16_t port, Options options,
                                              std::chrono::milliseconds connect_timeout = std::chrono::seconds(5));

  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Control

  /// Discovers every module, sorted by id.
  std::vector<debug::ModuleDescriptor> enumerate();
  const std::vector<debug::ModuleDescriptor>& modules() const { return modules_; }

  std::uint16_t read_register(debug::ModuleId id, std::uint16_t reg);
  /// Writes and reads back; throws NackTimeout when the value does not stick.
  void write_register(debug::ModuleId id, std::uint16_t reg, std::uint16_t value);

  void set_trigger(const debug::TriggerSpec& spec);
  void start_collection(std::span<const debug::ModuleId> ids);
  void stop_collection(std::span<const debug::ModuleId> ids);
  void start_collection_all();
  void stop_collection_all();
  /// Ends the configuration phase; the simulator starts running.
  void run();

  // Events

  /// The next trace event; nullopt at end of stream. Throws Timeout or
  /// MalformedFrame.
  std::optional<TraceEvent> next_event(std::optional<std::chrono::milliseconds> timeout = std::nullopt);
  /// Like next_event, but also surfaces watermarks.
  std::optional<StreamItem> next_item(std::optional<std::chrono::milliseconds> timeout = std::nullopt);
  bool ended() const;

 private:
  Session(std::unique_ptr<daemon::ByteChannel> channel, Options options);
  void reader_loop();
  void send(const DebugPacket& p);
  DebugPacket await_control(PacketType type, std::optional<debug::ModuleId> src,
                            std::optional<std::uint16_t> reg, const char* what);
  const debug::ModuleDescriptor& module(debug::ModuleId id);
  std::vector<debug::ModuleId> trace_modules();

  std::unique_ptr<daemon::ByteChannel> channel_;
  Options options_;
  std::vector<debug::ModuleDescriptor> modules_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<StreamItem> items_;
  std::deque<DebugPacket> control_;
  std::exception_ptr error_;
  bool eof_ = false;
  bool stop_ = false;

  std::mutex control_mu_;
  std::thread reader_;
};

}  // namespace tilesim::host
