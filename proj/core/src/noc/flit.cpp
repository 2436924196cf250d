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

#include "tilesim/noc/flit.hpp"

namespace tilesim::noc {

const char* to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::Msg: return "MSG";
    case TrafficClass::Req: return "REQ";
    case TrafficClass::Resp: return "RESP";
  }
  return "?";
}

const char* to_string(FlitKind k) {
  switch (k) {
    case FlitKind::Header: return "Header";
    case FlitKind::Payload: return "Payload";
    case FlitKind::Tail: return "Tail";
    case FlitKind::Single: return "Single";
  }
  return "?";
}

BodyTooLong::BodyTooLong(std::size_t words)
    : std::length_error("packet body of " + std::to_string(words) + " words exceeds " +
                        std::to_string(kMaxPacketBody)) {}

std::uint32_t encode_header(TrafficClass cls, TileId src, TileId dst) {
  return (static_cast<std::uint32_t>(cls) << 30) | ((src & 0x7FFFu) << 15) | (dst & 0x7FFFu);
}

RouteHeader decode_header(std::uint32_t word) {
  const auto cls = word >> 30;
  if (cls >= kNumClasses) throw BadPacket("header carries reserved traffic class 3");
  return {static_cast<TrafficClass>(cls), (word >> 15) & 0x7FFFu, word & 0x7FFFu};
}

std::vector<Flit> packetize(TrafficClass cls, TileId src, TileId dst,
                            std::span<const std::uint32_t> body, std::uint32_t flit_width) {
  if (flit_width != kDataFlitWidth) {
    throw std::invalid_argument("data NoC flits are 32 bits wide, got " + std::to_string(flit_width));
  }
  if (body.size() > kMaxPacketBody) throw BodyTooLong(body.size());
  if (src >= kMaxTiles || dst >= kMaxTiles) throw std::invalid_argument("tile id out of range");

  const auto vc = static_cast<std::uint8_t>(vc_for(cls));
  std::vector<Flit> flits;
  flits.reserve(body.size() + 1);
  const auto header = encode_header(cls, src, dst);
  if (body.empty()) {
    flits.push_back({FlitKind::Single, vc, header});
    return flits;
  }
  flits.push_back({FlitKind::Header, vc, header});
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto kind = (i + 1 == body.size()) ? FlitKind::Tail : FlitKind::Payload;
    flits.push_back({kind, vc, body[i]});
  }
  return flits;
}

Packet depacketize(std::span<const Flit> flits) {
  if (flits.empty()) throw BadPacket("empty flit sequence");
  const auto& head = flits.front();
  if (!head.is_head()) throw BadPacket("packet does not start with a head flit");
  const auto route = decode_header(head.payload);
  if (head.vc != vc_for(route.cls)) throw BadPacket("VC does not match traffic class");

  Packet p{route.cls, route.src, route.dst, {}};
  if (head.kind == FlitKind::Single) {
    if (flits.size() != 1) throw BadPacket("Single flit followed by more flits");
    return p;
  }
  if (flits.size() < 2) throw BadPacket("Header without Tail");
  for (std::size_t i = 1; i < flits.size(); ++i) {
    const bool last = i + 1 == flits.size();
    const auto expected = last ? FlitKind::Tail : FlitKind::Payload;
    if (flits[i].kind != expected) throw BadPacket("unexpected flit kind inside packet");
    if (flits[i].vc != head.vc) throw BadPacket("VC changed inside packet");
    p.body.push_back(flits[i].payload);
  }
  return p;
}

}  // namespace tilesim::noc
