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
 * @file flit.hpp
 * @brief Flits and packets of the data NoC.
 *
 * A packet travels as Header, Payload*, Tail, or as a lone Single flit when
 * its body is empty. The header flit carries the routing word:
 *
 *   bits [31:30]  traffic class (MSG=0, REQ=1, RESP=2)
 *   bits [29:15]  source tile id
 *   bits [14:0]   destination tile id
 *
 * The class also selects the virtual channel, so a packet keeps one VC on
 * every link it crosses.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilesim::noc {

using TileId = std::uint32_t;

enum class FlitKind : std::uint8_t { Header, Payload, Tail, Single };

enum class TrafficClass : std::uint8_t { Msg = 0, Req = 1, Resp = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::uint32_t kDataFlitWidth = 32;
inline constexpr TileId kMaxTiles = 1u << 15;

/// Longest packet body in words: 32 data words plus up to two protocol words
/// that the network adapter prepends (message descriptor, DMA address).
inline constexpr std::size_t kMaxPayloadWords = 32;
inline constexpr std::size_t kMaxProtocolWords = 2;
inline constexpr std::size_t kMaxPacketBody = kMaxPayloadWords + kMaxProtocolWords;

inline constexpr int vc_for(TrafficClass c) { return static_cast<int>(c); }

const char* to_string(TrafficClass c);
const char* to_string(FlitKind k);

struct Flit {
  FlitKind kind = FlitKind::Single;
  std::uint8_t vc = 0;
  std::uint32_t payload = 0;

  bool is_head() const { return kind == FlitKind::Header || kind == FlitKind::Single; }
  bool is_tail() const { return kind == FlitKind::Tail || kind == FlitKind::Single; }

  friend bool operator==(const Flit&, const Flit&) = default;
};

struct Packet {
  TrafficClass cls = TrafficClass::Msg;
  TileId src = 0;
  TileId dst = 0;
  std::vector<std::uint32_t> body;

  friend bool operator==(const Packet&, const Packet&) = default;
};

class BodyTooLong : public std::length_error {
 public:
  explicit BodyTooLong(std::size_t words);
};

class BadPacket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RouteHeader {
  TrafficClass cls;
  TileId src;
  TileId dst;
};

std::uint32_t encode_header(TrafficClass cls, TileId src, TileId dst);
RouteHeader decode_header(std::uint32_t word);

/// Expands a packet into its flit sequence. Throws BodyTooLong past
/// kMaxPacketBody words and std::invalid_argument for flit widths other than
/// the 32-bit data NoC width or out-of-range tile ids.
std::vector<Flit> packetize(TrafficClass cls, TileId src, TileId dst,
                            std::span<const std::uint32_t> body,
                            std::uint32_t flit_width = kDataFlitWidth);

inline std::vector<Flit> packetize(const Packet& p) {
  return packetize(p.cls, p.src, p.dst, p.body);
}

/// Inverse of packetize. Throws BadPacket on a malformed flit sequence.
Packet depacketize(std::span<const Flit> flits);

}  // namespace tilesim::noc
