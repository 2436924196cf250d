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
 * @file decode.hpp
 * @brief Host-side wire decoding, written against the documented layout
 * rather than by reusing the on-chip packetizer, so each side checks the
 * other.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/debug/packet.hpp"

namespace tilesim::host {

using debug::DebugPacket;
using debug::ModuleId;
using debug::PacketType;
using debug::TraceEvent;

class MalformedFrame : public std::runtime_error {
 public:
  MalformedFrame(std::uint64_t offset, std::string reason);
  std::uint64_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::uint64_t offset_;
  std::string reason_;
};

class MalformedEvent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incremental frame splitter over an ordered byte stream.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// The next complete packet, or nullopt if more bytes are needed. Throws
  /// MalformedFrame with the stream offset of the offending frame.
  std::optional<DebugPacket> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::uint64_t consumed_ = 0;
};

struct ItraceRun {
  std::uint32_t start_pc = 0;
  std::uint32_t run_length = 1;
  friend bool operator==(const ItraceRun&, const ItraceRun&) = default;
};

struct NocStatRecord {
  std::uint32_t window = 0;
  std::array<std::uint16_t, 5> counts{};  // N, E, S, W, L
  friend bool operator==(const NocStatRecord&, const NocStatRecord&) = default;
};

struct TriggerRecord {
  ModuleId origin = 0;
  std::uint16_t action = 0;
  std::uint16_t scope = 0;
  bool received = false;
  friend bool operator==(const TriggerRecord&, const TriggerRecord&) = default;
};

struct FaultRecord {
  std::uint16_t code = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  friend bool operator==(const FaultRecord&, const FaultRecord&) = default;
};

struct DmaRecord {
  std::uint16_t txn = 0;
  std::uint16_t remote_tile = 0;
  std::uint16_t length = 0;
  friend bool operator==(const DmaRecord&, const DmaRecord&) = default;
};

using EventDetail = std::variant<ItraceRun, NocStatRecord, TriggerRecord, FaultRecord, DmaRecord>;

struct DecodedEvent {
  ModuleId module = 0;
  std::uint32_t timestamp = 0;
  PacketType type = PacketType::Itrace;
  EventDetail detail;
  friend bool operator==(const DecodedEvent&, const DecodedEvent&) = default;
};

/// Throws MalformedEvent on a payload that does not fit its type.
DecodedEvent decode_event(const TraceEvent& e);

/// Expands each (start, n) into start, start + 4, ..., start + 4 (n - 1).
std::vector<std::uint32_t> decompress_itrace(std::span<const ItraceRun> runs);

/// {"module", "type", "timestamp", "payload": {...}}
nlohmann::json to_json(const DecodedEvent& e);
/// One JSON-lines record with sorted keys, newline terminated.
std::string jsonl_line(const DecodedEvent& e);

}  // namespace tilesim::host
