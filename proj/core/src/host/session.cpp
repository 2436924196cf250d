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

#include "tilesim/host/session.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "tilesim/debug/registers.hpp"

namespace tilesim::host {

using debug::ModuleId;

Session::Session(std::unique_ptr<daemon::ByteChannel> channel, Options options)
    : channel_(std::move(channel)), options_(options) {
  reader_ = std::thread([this] { reader_loop(); });
}

std::unique_ptr<Session> Session::open(std::unique_ptr<daemon::ByteChannel> channel, Options options) {
  if (!channel) throw std::invalid_argument("session needs a channel");
  return std::unique_ptr<Session>(new Session(std::move(channel), options));
}

std::unique_ptr<Session> Session::connect_tcp(const std::string& host, std::uint16_t port, Options options,
                                              std::chrono::milliseconds connect_timeout) {
  return open(daemon::TcpChannel::connect(host, port, connect_timeout), options);
}

Session::~Session() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  channel_->close();
  if (reader_.joinable()) reader_.join();
}

void Session::reader_loop() {
  FrameDecoder decoder;
  std::array<std::uint8_t, 8192> buf{};
  for (;;) {
    {
      std::lock_guard lock(mu_);
      if (stop_) return;
    }
    std::optional<std::size_t> n;
    try {
      n = channel_->read(buf, std::chrono::milliseconds(50));
    } catch (...) {
      std::lock_guard lock(mu_);
      error_ = std::current_exception();
      eof_ = true;
      cv_.notify_all();
      return;
    }
    if (!n) continue;
    if (*n == 0) {
      std::lock_guard lock(mu_);
      if (decoder.buffered() != 0) {
        error_ = std::make_exception_ptr(MalformedFrame(0, "stream ended inside a frame"));
      }
      eof_ = true;
      cv_.notify_all();
      return;
    }
    decoder.feed(std::span<const std::uint8_t>(buf.data(), *n));
    std::lock_guard lock(mu_);
    try {
      while (auto p = decoder.next()) {
        if (debug::is_event_type(p->type)) {
          items_.push_back({debug::to_event(*p), 0});
        } else if (p->type == PacketType::Watermark && p->body.size() == 2) {
          items_.push_back({std::nullopt, (std::uint32_t{p->body[0]} << 16) | p->body[1]});
        } else {
          control_.push_back(std::move(*p));
        }
      }
    } catch (const MalformedFrame&) {
      // The stream cannot be resynchronised after a bad frame.
      error_ = std::current_exception();
      eof_ = true;
      cv_.notify_all();
      return;
    }
    cv_.notify_all();
  }
}

void Session::send(const DebugPacket& p) { channel_->write(debug::extif_frame(p)); }

DebugPacket Session::await_control(PacketType type, std::optional<ModuleId> src, std::optional<std::uint16_t> reg,
                                   const char* what) {
  std::unique_lock lock(mu_);
  const auto deadline = std::chrono::steady_clock::now() + options_.control_timeout;
  for (;;) {
    while (!control_.empty()) {
      auto p = std::move(control_.front());
      control_.pop_front();
      const bool match = p.type == type && (!src || p.src == *src) && (!reg || (!p.body.empty() && p.body[0] == *reg));
      if (match) return p;
      // Anything else is a stale reply to an abandoned request.
    }
    if (eof_) throw NackTimeout(std::string(what) + ": stream ended before the reply");
    if (cv_.wait_until(lock, deadline) == std::cv_status::timeout && control_.empty()) {
      throw NackTimeout(std::string(what) + ": no reply within the control timeout");
    }
  }
}

std::vector<debug::ModuleDescriptor> Session::enumerate() {
  std::lock_guard control(control_mu_);
  send({debug::kExtIfModule, debug::kExtIfModule, PacketType::Discover, 0, {}});
  const auto ext = await_control(PacketType::Discover, debug::kExtIfModule, std::nullopt, "DISCOVER");
  if (ext.body.size() != 3) throw NackTimeout("malformed external interface descriptor");
  const std::size_t count = ext.body[2];

  std::map<ModuleId, debug::ModuleDescriptor> found;
  found[0] = {0, debug::ModuleType::ExtIf, ext.body[1], ext.body[2]};
  while (found.size() < count) {
    const auto p = await_control(PacketType::Discover, std::nullopt, std::nullopt, "DISCOVER");
    if (p.body.size() != 3 || p.body[0] > 2) throw NackTimeout("malformed module descriptor");
    found[p.src] = {p.src, static_cast<debug::ModuleType>(p.body[0]), p.body[1], p.body[2]};
  }
  modules_.clear();
  for (const auto& [id, d] : found) modules_.push_back(d);
  return modules_;
}

std::uint16_t Session::read_register(ModuleId id, std::uint16_t reg) {
  std::lock_guard control(control_mu_);
  send({id, debug::kExtIfModule, PacketType::RegRead, 0, {reg}});
  const auto p = await_control(PacketType::RegValue, id, reg, "REG_READ");
  if (p.body.size() != 3) throw NackTimeout("malformed REG_VALUE");
  if (p.body[2] == 0) {
    throw std::invalid_argument("module " + std::to_string(id) + " has no register " + std::to_string(reg));
  }
  return p.body[1];
}

void Session::write_register(ModuleId id, std::uint16_t reg, std::uint16_t value) {
  {
    std::lock_guard control(control_mu_);
    send({id, debug::kExtIfModule, PacketType::RegWrite, 0, {reg, value}});
  }
  if (const auto back = read_register(id, reg); back != value) {
    throw NackTimeout("module " + std::to_string(id) + " register " + std::to_string(reg) + " reads back " +
                      std::to_string(back) + " after writing " + std::to_string(value));
  }
}

const debug::ModuleDescriptor& Session::module(ModuleId id) {
  if (modules_.empty()) enumerate();
  const auto it = std::find_if(modules_.begin(), modules_.end(), [&](const auto& m) { return m.id == id; });
  if (it == modules_.end()) throw NoSuchModule("no debug module with id " + std::to_string(id));
  return *it;
}

void Session::set_trigger(const debug::TriggerSpec& spec) {
  namespace reg = debug::reg;
  const auto type = module(spec.module).type;
  debug::validate(spec, type);
  const auto id = spec.module;
  write_register(id, reg::kTrigArm, 0);
  write_register(id, reg::kTrigCond, static_cast<std::uint16_t>(spec.condition));
  write_register(id, reg::kTrigArgHi, debug::hi16(spec.arg));
  write_register(id, reg::kTrigArgLo, debug::lo16(spec.arg));
  write_register(id, reg::kTrigWindow, spec.window);
  write_register(id, reg::kTrigAction, static_cast<std::uint16_t>(spec.action));
  write_register(id, reg::kTrigScope, static_cast<std::uint16_t>(spec.scope));
  {
    std::lock_guard control(control_mu_);
    send({id, debug::kExtIfModule, PacketType::RegWrite, 0, {reg::kTrigArm, 1}});
  }
  if (read_register(id, reg::kTrigArm) == 1) return;
  const auto err = read_register(id, reg::kTrigError);
  if (err == reg::kTrigErrTypeMismatch) throw TypeMismatch("module " + std::to_string(id) + " rejected the condition");
  throw std::invalid_argument("module " + std::to_string(id) + " rejected the trigger argument");
}

std::vector<ModuleId> Session::trace_modules() {
  if (modules_.empty()) enumerate();
  std::vector<ModuleId> out;
  for (const auto& m : modules_) {
    if (m.type != debug::ModuleType::ExtIf) out.push_back(m.id);
  }
  return out;
}

void Session::start_collection(std::span<const ModuleId> ids) {
  for (const auto id : ids) {
    if (module(id).type == debug::ModuleType::ExtIf) throw NoSuchModule("the external interface does not collect");
    write_register(id, debug::reg::kEnable, 1);
  }
}

void Session::stop_collection(std::span<const ModuleId> ids) {
  for (const auto id : ids) {
    if (module(id).type == debug::ModuleType::ExtIf) throw NoSuchModule("the external interface does not collect");
    write_register(id, debug::reg::kEnable, 0);
  }
}

void Session::start_collection_all() { start_collection(trace_modules()); }
void Session::stop_collection_all() { stop_collection(trace_modules()); }

void Session::run() {
  std::lock_guard control(control_mu_);
  send({debug::kExtIfModule, debug::kExtIfModule, PacketType::RegWrite, 0, {debug::reg::kRun, 1}});
}

std::optional<StreamItem> Session::next_item(std::optional<std::chrono::milliseconds> timeout) {
  std::unique_lock lock(mu_);
  const auto limit = timeout.value_or(options_.event_timeout);
  if (!cv_.wait_for(lock, limit, [&] { return !items_.empty() || eof_; })) {
    throw Timeout("no trace event within " + std::to_string(limit.count()) + " ms");
  }
  if (!items_.empty()) {
    auto item = std::move(items_.front());
    items_.pop_front();
    return item;
  }
  if (error_) std::rethrow_exception(error_);
  return std::nullopt;
}

std::optional<TraceEvent> Session::next_event(std::optional<std::chrono::milliseconds> timeout) {
  for (;;) {
    auto item = next_item(timeout);
    if (!item) return std::nullopt;
    if (item->event) return std::move(item->event);
  }
}

bool Session::ended() const {
  std::lock_guard lock(mu_);
  return eof_ && items_.empty();
}

}  // namespace tilesim::host
