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

#include "tilesim/host/decode.hpp"

namespace tilesim::host {

namespace {

constexpr std::size_t kMinFlits = 4;
constexpr std::size_t kMaxFlits = 16;

std::uint32_t word32(std::uint16_t hi, std::uint16_t lo) { return (std::uint32_t{hi} << 16) | lo; }

void expect_len(const TraceEvent& e, std::size_t n) {
  if (e.payload.size() != n) {
    throw MalformedEvent(std::string(debug::to_string(e.kind)) + " payload of " + std::to_string(e.payload.size()) +
                         " words from module " + std::to_string(e.module) + ", expected " + std::to_string(n));
  }
}

}  // namespace

MalformedFrame::MalformedFrame(std::uint64_t offset, std::string reason)
    : std::runtime_error("malformed frame at byte " + std::to_string(offset) + ": " + reason),
      offset_(offset),
      reason_(std::move(reason)) {}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<DebugPacket> FrameDecoder::next() {
  const auto avail = buf_.size() - pos_;
  if (avail < 2) return std::nullopt;
  const auto* b = buf_.data() + pos_;
  const std::size_t count = b[0] | (std::size_t{b[1]} << 8);
  if (count < kMinFlits || count > kMaxFlits) {
    throw MalformedFrame(consumed_, "flit count " + std::to_string(count) + " outside [4, 16]");
  }
  const auto size = 2 + 2 * count;
  if (avail < size) return std::nullopt;

  std::vector<std::uint16_t> f(count);
  for (std::size_t i = 0; i < count; ++i) f[i] = static_cast<std::uint16_t>(b[2 + 2 * i] | (b[3 + 2 * i] << 8));
  if (f[1] > 0xFF || !debug::is_known_type(static_cast<std::uint8_t>(f[1]))) {
    throw MalformedFrame(consumed_, "unknown packet type " + std::to_string(f[1]));
  }
  DebugPacket p;
  p.dest = static_cast<ModuleId>(f[0] >> 8);
  p.src = static_cast<ModuleId>(f[0] & 0xFF);
  p.type = static_cast<PacketType>(f[1]);
  p.timestamp = word32(f[2], f[3]);
  p.body.assign(f.begin() + 4, f.end());
  pos_ += size;
  consumed_ += size;
  return p;
}

DecodedEvent decode_event(const TraceEvent& e) {
  DecodedEvent d{e.module, e.timestamp, e.kind, {}};
  const auto& w = e.payload;
  switch (e.kind) {
    case PacketType::Itrace:
      expect_len(e, 3);
      if (w[2] == 0) throw MalformedEvent("ITRACE run of length 0");
      d.detail = ItraceRun{word32(w[0], w[1]), w[2]};
      break;
    case PacketType::NocStat: {
      expect_len(e, 7);
      NocStatRecord r{word32(w[0], w[1]), {}};
      for (std::size_t i = 0; i < 5; ++i) r.counts[i] = w[2 + i];
      d.detail = r;
      break;
    }
    case PacketType::Trigger:
      expect_len(e, 4);
      d.detail = TriggerRecord{static_cast<ModuleId>(w[0]), w[1], w[2], w[3] != 0};
      break;
    case PacketType::Fault:
      expect_len(e, 5);
      d.detail = FaultRecord{w[0], word32(w[1], w[2]), word32(w[3], w[4])};
      break;
    case PacketType::DmaDone:
      expect_len(e, 3);
      d.detail = DmaRecord{w[0], w[1], w[2]};
      break;
    default:
      throw MalformedEvent("packet type " + std::to_string(static_cast<int>(e.kind)) + " is not a trace event");
  }
  return d;
}

std::vector<std::uint32_t> decompress_itrace(std::span<const ItraceRun> runs) {
  std::vector<std::uint32_t> pcs;
  for (const auto& r : runs) {
    for (std::uint32_t i = 0; i < r.run_length; ++i) pcs.push_back(r.start_pc + 4 * i);
  }
  return pcs;
}

namespace {

struct PayloadJson {
  nlohmann::json operator()(const ItraceRun& r) const {
    return {{"start_pc", r.start_pc}, {"run_length", r.run_length}};
  }
  nlohmann::json operator()(const NocStatRecord& r) const {
    return {{"window", r.window},
            {"counts",
             {{"N", r.counts[0]}, {"E", r.counts[1]}, {"S", r.counts[2]}, {"W", r.counts[3]}, {"L", r.counts[4]}}}};
  }
  nlohmann::json operator()(const TriggerRecord& r) const {
    return {{"origin", r.origin},
            {"action", r.action == 0 ? "StartCollection" : "StopCollection"},
            {"scope", r.scope == 0 ? "Local" : "Global"},
            {"received", r.received}};
  }
  nlohmann::json operator()(const FaultRecord& r) const {
    const char* kind = r.code == 1 ? "MemoryFault" : r.code == 2 ? "IllegalInstruction" : r.code == 3 ? "UnknownPort" : "Unknown";
    return {{"code", r.code}, {"kind", kind}, {"a", r.a}, {"b", r.b}};
  }
  nlohmann::json operator()(const DmaRecord& r) const {
    return {{"txn", r.txn}, {"remote_tile", r.remote_tile}, {"length", r.length}};
  }
};

}  // namespace

nlohmann::json to_json(const DecodedEvent& e) {
  return {{"module", e.module},
          {"type", debug::to_string(e.type)},
          {"timestamp", e.timestamp},
          {"payload", std::visit(PayloadJson{}, e.detail)}};
}

std::string jsonl_line(const DecodedEvent& e) { return to_json(e).dump() + "\n"; }

}  // namespace tilesim::host
