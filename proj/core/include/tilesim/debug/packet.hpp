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
 * @file packet.hpp
 * @brief Trace events, debug packets and the off-chip frame format.
 *
 * Debug packet flits (16 bit each):
 *
 *   flit0  dest << 8 | src
 *   flit1  type (low byte)
 *   flit2  timestamp[31:16]
 *   flit3  timestamp[15:0]
 *   flit4+ body, at most 12 words
 *
 * A frame on the host link is a little-endian 16-bit flit count followed by
 * the flits, each little-endian.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilesim::debug {

using ModuleId = std::uint8_t;

inline constexpr ModuleId kExtIfModule = 0;
inline constexpr ModuleId kBroadcast = 0xFF;
inline constexpr std::size_t kMaxBodyWords = 12;
inline constexpr std::size_t kHeaderFlits = 4;
inline constexpr std::size_t kMaxPacketFlits = kHeaderFlits + kMaxBodyWords;

enum class PacketType : std::uint8_t {
  Itrace = 0x01,
  NocStat = 0x02,
  Trigger = 0x03,
  Fault = 0x04,
  DmaDone = 0x05,
  Discover = 0x10,
  RegWrite = 0x11,
  RegRead = 0x12,
  RegValue = 0x13,
  Watermark = 0x14,  // extif to host: every event stamped below body[0..1] was delivered
};

bool is_event_type(PacketType t);
bool is_known_type(std::uint8_t raw);
const char* to_string(PacketType t);

enum class ModuleType : std::uint8_t { ExtIf = 0, CoreTrace = 1, NocStat = 2 };

const char* to_string(ModuleType t);

struct ModuleDescriptor {
  ModuleId id = 0;
  ModuleType type = ModuleType::ExtIf;
  std::uint16_t version = 1;
  std::uint16_t attach = 0;  // EXTIF: module count; CORE_TRACE: tile; NOC_STAT: x << 8 | y
  friend bool operator==(const ModuleDescriptor&, const ModuleDescriptor&) = default;
};

/// Fault codes carried by FAULT events.
enum class FaultCode : std::uint16_t { MemoryFault = 1, IllegalInstruction = 2, UnknownPort = 3 };

struct TraceEvent {
  ModuleId module = 0;
  std::uint32_t timestamp = 0;
  PacketType kind = PacketType::Itrace;
  std::vector<std::uint16_t> payload;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
  friend auto operator<=>(const TraceEvent&, const TraceEvent&) = default;
};

struct DebugPacket {
  ModuleId dest = 0;
  ModuleId src = 0;
  PacketType type = PacketType::Itrace;
  std::uint32_t timestamp = 0;
  std::vector<std::uint16_t> body;

  friend bool operator==(const DebugPacket&, const DebugPacket&) = default;
};

class PayloadTooLong : public std::length_error {
 public:
  explicit PayloadTooLong(std::size_t words);
};

class BadDebugPacket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FrameTooShort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FlitCountMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint16_t> debug_packetize(const DebugPacket& p);
std::vector<std::uint16_t> debug_packetize(const TraceEvent& e);
DebugPacket parse_packet(std::span<const std::uint16_t> flits);

/// Trace events always travel to the external interface.
DebugPacket to_packet(const TraceEvent& e);
TraceEvent to_event(const DebugPacket& p);

std::vector<std::uint8_t> extif_frame(std::span<const std::uint16_t> flits);
std::vector<std::uint8_t> extif_frame(const DebugPacket& p);

/// Parses exactly one frame.
DebugPacket extif_parse(std::span<const std::uint8_t> bytes);

struct FrameSplit {
  DebugPacket packet;
  std::size_t consumed = 0;
};

/// Streaming variant: returns nullopt while `bytes` holds only a prefix of
/// the next frame. A flit count outside 4..16 throws FlitCountMismatch.
std::optional<FrameSplit> next_frame(std::span<const std::uint8_t> bytes);

inline std::uint16_t hi16(std::uint32_t v) { return static_cast<std::uint16_t>(v >> 16); }
inline std::uint16_t lo16(std::uint32_t v) { return static_cast<std::uint16_t>(v & 0xFFFF); }
inline std::uint32_t join16(std::uint16_t hi, std::uint16_t lo) {
  return (static_cast<std::uint32_t>(hi) << 16) | lo;
}

}  // namespace tilesim::debug
