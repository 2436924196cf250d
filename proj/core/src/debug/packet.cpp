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

#include "tilesim/debug/packet.hpp"

#include <string>

namespace tilesim::debug {

bool is_event_type(PacketType t) {
  const auto v = static_cast<std::uint8_t>(t);
  return v >= 0x01 && v <= 0x05;
}

bool is_known_type(std::uint8_t raw) {
  return (raw >= 0x01 && raw <= 0x05) || (raw >= 0x10 && raw <= 0x14);
}

const char* to_string(PacketType t) {
  switch (t) {
    case PacketType::Itrace: return "ITRACE";
    case PacketType::NocStat: return "NOCSTAT";
    case PacketType::Trigger: return "TRIGGER";
    case PacketType::Fault: return "FAULT";
    case PacketType::DmaDone: return "DMA_DONE";
    case PacketType::Discover: return "DISCOVER";
    case PacketType::RegWrite: return "REG_WRITE";
    case PacketType::RegRead: return "REG_READ";
    case PacketType::RegValue: return "REG_VALUE";
    case PacketType::Watermark: return "WATERMARK";
  }
  return "?";
}

const char* to_string(ModuleType t) {
  switch (t) {
    case ModuleType::ExtIf: return "EXTIF";
    case ModuleType::CoreTrace: return "CORE_TRACE";
    case ModuleType::NocStat: return "NOC_STAT";
  }
  return "?";
}

PayloadTooLong::PayloadTooLong(std::size_t words)
    : std::length_error("debug packet body of " + std::to_string(words) + " words exceeds " +
                        std::to_string(kMaxBodyWords)) {}

std::vector<std::uint16_t> debug_packetize(const DebugPacket& p) {
  if (p.body.size() > kMaxBodyWords) throw PayloadTooLong(p.body.size());
  std::vector<std::uint16_t> flits;
  flits.reserve(kHeaderFlits + p.body.size());
  flits.push_back(static_cast<std::uint16_t>((p.dest << 8) | p.src));
  flits.push_back(static_cast<std::uint8_t>(p.type));
  flits.push_back(hi16(p.timestamp));
  flits.push_back(lo16(p.timestamp));
  flits.insert(flits.end(), p.body.begin(), p.body.end());
  return flits;
}

std::vector<std::uint16_t> debug_packetize(const TraceEvent& e) { return debug_packetize(to_packet(e)); }

DebugPacket parse_packet(std::span<const std::uint16_t> flits) {
  if (flits.size() < kHeaderFlits) throw BadDebugPacket("debug packet shorter than its header");
  if (flits.size() > kMaxPacketFlits) throw BadDebugPacket("debug packet longer than 16 flits");
  if (flits[1] > 0xFF || !is_known_type(static_cast<std::uint8_t>(flits[1]))) {
    throw BadDebugPacket("unknown debug packet type " + std::to_string(flits[1]));
  }
  DebugPacket p;
  p.dest = static_cast<ModuleId>(flits[0] >> 8);
  p.src = static_cast<ModuleId>(flits[0] & 0xFF);
  p.type = static_cast<PacketType>(flits[1]);
  p.timestamp = join16(flits[2], flits[3]);
  p.body.assign(flits.begin() + kHeaderFlits, flits.end());
  return p;
}

DebugPacket to_packet(const TraceEvent& e) {
  if (!is_event_type(e.kind)) throw BadDebugPacket("trace event with a control type");
  return {kExtIfModule, e.module, e.kind, e.timestamp, e.payload};
}

TraceEvent to_event(const DebugPacket& p) {
  if (!is_event_type(p.type)) throw BadDebugPacket("control packet is not a trace event");
  return {p.src, p.timestamp, p.type, p.body};
}

std::vector<std::uint8_t> extif_frame(std::span<const std::uint16_t> flits) {
  std::vector<std::uint8_t> out;
  out.reserve(2 + 2 * flits.size());
  const auto n = static_cast<std::uint16_t>(flits.size());
  out.push_back(static_cast<std::uint8_t>(n & 0xFF));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  for (const auto f : flits) {
    out.push_back(static_cast<std::uint8_t>(f & 0xFF));
    out.push_back(static_cast<std::uint8_t>(f >> 8));
  }
  return out;
}

std::vector<std::uint8_t> extif_frame(const DebugPacket& p) { return extif_frame(debug_packetize(p)); }

namespace {

std::size_t declared_flits(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes[0] | (static_cast<std::size_t>(bytes[1]) << 8);
  if (n < kHeaderFlits || n > kMaxPacketFlits) {
    throw FlitCountMismatch("frame declares " + std::to_string(n) + " flits");
  }
  return n;
}

DebugPacket decode_flits(std::span<const std::uint8_t> bytes, std::size_t n) {
  std::vector<std::uint16_t> flits(n);
  for (std::size_t i = 0; i < n; ++i) {
    flits[i] = static_cast<std::uint16_t>(bytes[2 + 2 * i] | (bytes[3 + 2 * i] << 8));
  }
  return parse_packet(flits);
}

}  // namespace

DebugPacket extif_parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) throw FrameTooShort("frame has no flit count");
  const auto n = declared_flits(bytes);
  if (bytes.size() < 2 + 2 * n) throw FrameTooShort("frame truncated");
  if (bytes.size() > 2 + 2 * n) throw FlitCountMismatch("frame longer than its flit count");
  return decode_flits(bytes, n);
}

std::optional<FrameSplit> next_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2) return std::nullopt;
  const auto n = declared_flits(bytes);
  if (bytes.size() < 2 + 2 * n) return std::nullopt;
  return FrameSplit{decode_flits(bytes, n), 2 + 2 * n};
}

}  // namespace tilesim::debug
