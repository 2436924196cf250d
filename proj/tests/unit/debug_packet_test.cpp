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

#include <gtest/gtest.h>

#include <random>

#include "tilesim/debug/itrace.hpp"
#include "tilesim/debug/packet.hpp"
#include "tilesim/host/decode.hpp"

using namespace tilesim;
using namespace tilesim::debug;

namespace {

TraceEvent itrace_example() { return {3, 0x10, PacketType::Itrace, {0x0000, 0x0040, 0x0002}}; }

std::vector<ItraceRecord> compress(const std::vector<std::uint32_t>& pcs) {
  ItraceCompressor c;
  std::vector<ItraceRecord> out;
  for (const auto pc : pcs) {
    if (auto r = c.feed(pc)) out.push_back(*r);
  }
  if (auto r = c.flush()) out.push_back(*r);
  return out;
}

std::vector<std::uint32_t> expand(const std::vector<ItraceRecord>& recs) {
  std::vector<host::ItraceRun> runs;
  for (const auto& r : recs) runs.push_back({r.start_pc, r.run_length});
  return host::decompress_itrace(runs);
}

}  // namespace

TEST(DebugPacket, ItraceExampleLayout) {
  EXPECT_EQ(debug_packetize(itrace_example()),
            (std::vector<std::uint16_t>{0x0003, 0x0001, 0x0000, 0x0010, 0x0000, 0x0040, 0x0002}));
}

TEST(DebugPacket, SevenFlitsMakeSixteenByteFrame) {
  const auto frame = extif_frame(debug_packetize(itrace_example()));
  ASSERT_EQ(frame.size(), 16u);
  EXPECT_EQ(frame[0], 7);
  EXPECT_EQ(frame[1], 0);
  EXPECT_EQ(frame[2], 0x03);  // little-endian flit 0
  EXPECT_EQ(frame[3], 0x00);
}

TEST(DebugPacket, FrameRoundTripAndErrors) {
  const auto p = to_packet(itrace_example());
  auto frame = extif_frame(p);
  EXPECT_EQ(extif_parse(frame), p);
  EXPECT_EQ(to_event(extif_parse(frame)), itrace_example());

  const std::vector<std::uint8_t> truncated(frame.begin(), frame.end() - 1);
  EXPECT_THROW(extif_parse(truncated), FrameTooShort);
  EXPECT_THROW(extif_parse(std::vector<std::uint8_t>{7}), FrameTooShort);
  auto longer = frame;
  longer.push_back(0);
  longer.push_back(0);
  EXPECT_THROW(extif_parse(longer), FlitCountMismatch);
  auto bad_count = frame;
  bad_count[0] = 2;
  EXPECT_THROW(extif_parse(bad_count), FlitCountMismatch);
}

TEST(DebugPacket, PayloadTooLong) {
  TraceEvent e{1, 0, PacketType::Fault, std::vector<std::uint16_t>(kMaxBodyWords + 1)};
  EXPECT_THROW(debug_packetize(e), PayloadTooLong);
  e.payload.pop_back();
  EXPECT_EQ(debug_packetize(e).size(), kMaxPacketFlits);
}

TEST(DebugPacket, RandomRoundTripThroughIndependentDecoder) {
  std::mt19937_64 rng(11);
  const PacketType kinds[] = {PacketType::Itrace, PacketType::NocStat, PacketType::Trigger, PacketType::Fault,
                              PacketType::DmaDone};
  std::vector<std::uint8_t> stream;
  std::vector<DebugPacket> sent;
  for (int i = 0; i < 500; ++i) {
    TraceEvent e{static_cast<ModuleId>(1 + rng() % 100), static_cast<std::uint32_t>(rng()), kinds[rng() % 5],
                 std::vector<std::uint16_t>(rng() % (kMaxBodyWords + 1))};
    for (auto& w : e.payload) w = static_cast<std::uint16_t>(rng());
    sent.push_back(to_packet(e));
    const auto f = extif_frame(sent.back());
    stream.insert(stream.end(), f.begin(), f.end());
  }
  host::FrameDecoder dec;
  std::vector<DebugPacket> got;
  // Feed in awkward chunk sizes.
  for (std::size_t pos = 0; pos < stream.size();) {
    const auto n = std::min<std::size_t>(1 + rng() % 7, stream.size() - pos);
    dec.feed(std::span(stream).subspan(pos, n));
    pos += n;
    while (auto p = dec.next()) got.push_back(*p);
  }
  EXPECT_EQ(got, sent);
  EXPECT_EQ(dec.buffered(), 0u);
}

TEST(DebugPacket, DecoderReportsCorruptCount) {
  auto frame = extif_frame(to_packet(itrace_example()));
  frame[0] = 0x40;
  host::FrameDecoder dec;
  dec.feed(frame);
  try {
    dec.next();
    FAIL();
  } catch (const host::MalformedFrame& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
}

TEST(DebugPacket, DecodeItraceExample) {
  const auto d = host::decode_event(itrace_example());
  EXPECT_EQ(d.module, 3);
  EXPECT_EQ(d.timestamp, 16u);
  EXPECT_EQ(std::get<host::ItraceRun>(d.detail), (host::ItraceRun{0x40, 2}));
  EXPECT_EQ(host::jsonl_line(d),
            "{\"module\":3,\"payload\":{\"run_length\":2,\"start_pc\":64},\"timestamp\":16,\"type\":\"ITRACE\"}\n");
  EXPECT_THROW(host::decode_event({3, 0, PacketType::Itrace, {1}}), host::MalformedEvent);
}

TEST(Itrace, Examples) {
  EXPECT_EQ(compress({0, 4, 8, 12}), (std::vector<ItraceRecord>{{0, 4}}));
  EXPECT_EQ(compress({0, 4, 64, 68}), (std::vector<ItraceRecord>{{0, 2}, {64, 2}}));
  EXPECT_TRUE(compress({}).empty());
  const std::vector<host::ItraceRun> r1{{0, 4}};
  EXPECT_EQ(host::decompress_itrace(r1), (std::vector<std::uint32_t>{0, 4, 8, 12}));
  const std::vector<host::ItraceRun> r2{{0x40, 1}};
  EXPECT_EQ(host::decompress_itrace(r2), (std::vector<std::uint32_t>{0x40}));
}

TEST(Itrace, LongRunIsSplit) {
  std::vector<std::uint32_t> pcs(ItraceCompressor::kMaxRun + 5);
  for (std::size_t i = 0; i < pcs.size(); ++i) pcs[i] = static_cast<std::uint32_t>(4 * i);
  const auto recs = compress(pcs);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].run_length, ItraceCompressor::kMaxRun);
  EXPECT_EQ(expand(recs), pcs);
}

TEST(Itrace, RoundTripProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::uint32_t> pcs(rng() % 3000);
    std::uint32_t pc = static_cast<std::uint32_t>(rng()) & ~3u;
    for (auto& p : pcs) {
      // Mostly sequential, with jumps, repeats and wraparound.
      const auto r = rng() % 10;
      if (r < 7) {
        pc += 4;
      } else if (r == 7) {
        pc = static_cast<std::uint32_t>(rng());
      } else if (r == 8) {
        pc -= 4 * (rng() % 20);
      }
      p = pc;
    }
    EXPECT_EQ(expand(compress(pcs)), pcs) << trial;
  }
}
