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

#include "fixtures.hpp"
#include "tilesim/na/adapter.hpp"
#include "tilesim/na/lsu.hpp"
#include "tilesim/na/mmio.hpp"
#include "tilesim/pe/assembler.hpp"

using namespace tilesim;
using na::DmaDir;
using na::NetworkAdapter;

namespace {

NetworkAdapter make_na(noc::TileId tile, std::uint32_t tiles = 4) {
  na::NaParams p;
  p.tile = tile;
  p.num_tiles = tiles;
  return NetworkAdapter(p);
}

// Pulls every queued packet out of an adapter without a live network.
std::vector<noc::Packet> drain(NetworkAdapter& a) {
  const noc::MeshNetwork idle(2, 2);
  std::vector<noc::Packet> out;
  std::array<std::vector<noc::Flit>, 3> partial;
  while (auto f = a.next_injection(idle)) {
    partial[f->vc].push_back(*f);
    if (f->is_tail()) {
      out.push_back(noc::depacketize(partial[f->vc]));
      partial[f->vc].clear();
    }
  }
  return out;
}

platform::SystemInstance idle_system(int w, int h) {
  return platform::map_configuration(tilesim::testing::mesh_config(w, h, false), {});
}

void tick_until(platform::SystemInstance& sys, const std::function<bool()>& done, std::uint64_t limit = 100000) {
  for (std::uint64_t i = 0; i < limit && !done(); ++i) sys.tick();
  ASSERT_TRUE(done());
}

}  // namespace

TEST(Adapter, MessagePacketFormat) {
  const std::vector<std::uint32_t> payload = {0x6869};
  const auto p = na::message_packet(0, 1, {3, 2}, payload);
  EXPECT_EQ(p.cls, noc::TrafficClass::Msg);
  EXPECT_EQ(p.src, 0u);
  EXPECT_EQ(p.dst, 3u);
  EXPECT_EQ(p.body, (std::vector<std::uint32_t>{1u << 24 | 2u << 16 | 1u, 0x6869}));
}

TEST(Adapter, SendBounds) {
  auto a = make_na(0);
  EXPECT_EQ(a.send(0, {1, 0}, std::vector<std::uint32_t>(32, 9)), na::SendStatus::Ok);
  const auto pkts = drain(a);
  ASSERT_EQ(pkts.size(), 1u);
  EXPECT_EQ(noc::packetize(pkts[0]).size(), 34u);
  EXPECT_EQ(a.send(0, {1, 0}, std::vector<std::uint32_t>(33, 9)), na::SendStatus::LenRange);
  EXPECT_EQ(a.send(0, {9, 0}, {}), na::SendStatus::BadDest);
  EXPECT_EQ(a.send(0, {1, 0}, {}), na::SendStatus::Ok);
  EXPECT_EQ(a.send(0, {1, 0}, {}), na::SendStatus::Busy);
}

TEST(Adapter, DeliverQueuesAndOverflows) {
  auto a = make_na(3);
  std::vector<std::uint32_t> mem(1024);
  const std::vector<std::uint32_t> w = {5};
  a.deliver(na::message_packet(0, 1, {3, 2}, w), mem);
  EXPECT_EQ(a.queue_length(2), 1u);
  EXPECT_EQ(a.mmio_access(na::reg::kRecvStatus + 8, false, 0, mem).value, 1u);
  for (int i = 0; i < 20; ++i) a.deliver(na::message_packet(0, 1, {3, 2}, w), mem);
  EXPECT_EQ(a.queue_length(2), 16u);
  EXPECT_TRUE(a.overflowed(2));
  EXPECT_EQ(a.stats().messages_dropped, 5u);
  const auto m = a.receive(2);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->src_tile, 0u);
  EXPECT_EQ(m->src_port, 1u);
  EXPECT_EQ(m->payload, w);
}

TEST(Adapter, UnknownPortRaisesEvent) {
  auto a = make_na(1);
  std::vector<std::uint32_t> mem(64);
  auto p = na::message_packet(0, 0, {1, 0}, {});
  p.body[0] |= 20u << 16;
  a.deliver(p, mem);
  const auto ev = a.take_events();
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, na::NaEvent::Kind::UnknownPort);
  EXPECT_EQ(ev[0].b, 20u);
  EXPECT_NE(a.mmio_access(na::reg::kSendGoStatus, false, 0, mem).value & na::reg::kStatusUnknownPort, 0u);
}

TEST(Adapter, ReadRequestServiced) {
  auto a = make_na(1);
  std::vector<std::uint32_t> mem(1024);
  for (std::uint32_t i = 0; i < 4; ++i) mem[0x100 / 4 + i] = 0xC0DE0000u + i;
  const std::uint32_t op = 3u << 24 | 0u << 16 | 4u;  // read, tag 3, segment 0, 4 words
  a.deliver({noc::TrafficClass::Req, 0, 1, {op, 0x100}}, mem);
  const auto out = drain(a);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].cls, noc::TrafficClass::Resp);
  EXPECT_EQ(out[0].dst, 0u);
  EXPECT_EQ(out[0].body, (std::vector<std::uint32_t>{op, 0xC0DE0000, 0xC0DE0001, 0xC0DE0002, 0xC0DE0003}));
}

TEST(Adapter, DmaSegmentsAndLimits) {
  auto a = make_na(0);
  std::vector<std::uint32_t> mem(16384);
  const auto zero = a.dma_start(DmaDir::ReadRemote, 0x100, 1, 0x200, 0, mem);
  EXPECT_TRUE(a.dma_done(zero));
  EXPECT_TRUE(drain(a).empty());

  a.dma_start(DmaDir::ReadRemote, 0x100, 1, 0x200, 100, mem);
  const auto reqs = drain(a);
  ASSERT_EQ(reqs.size(), 4u);
  std::vector<std::uint32_t> lens;
  for (const auto& r : reqs) lens.push_back(r.body[0] & 0xFFFF);
  EXPECT_EQ(lens, (std::vector<std::uint32_t>{32, 32, 32, 4}));

  for (int i = 0; i < 7; ++i) a.dma_start(DmaDir::WriteRemote, 0, 1, 0, 1, mem);
  EXPECT_EQ(a.dma_in_flight(), 8u);
  EXPECT_THROW(a.dma_start(DmaDir::WriteRemote, 0, 1, 0, 1, mem), na::NoFreeSlot);

  auto b = make_na(0);
  EXPECT_THROW(b.dma_start(DmaDir::ReadRemote, 0, 1, 0, 1025, mem), na::DmaRangeError);
  EXPECT_THROW(b.dma_start(DmaDir::ReadRemote, 2, 1, 0, 1, mem), na::DmaRangeError);
  EXPECT_THROW(b.dma_start(DmaDir::ReadRemote, 0, 1, 0x10000, 1, mem), na::DmaRangeError);
}

TEST(Adapter, DmaReadMatchesCopy) {
  auto sys = idle_system(2, 2);
  auto remote = sys.memory(1);
  for (std::uint32_t i = 0; i < 16; ++i) remote[0x200 / 4 + i] = 0xD0000000u + i;
  const auto txn = sys.adapter(0).dma_start(DmaDir::ReadRemote, 0x100, 1, 0x200, 16, sys.memory(0));
  tick_until(sys, [&] { return sys.adapter(0).dma_done(txn); });
  const auto local = sys.memory(0);
  for (std::uint32_t i = 0; i < 16; ++i) EXPECT_EQ(local[0x100 / 4 + i], remote[0x200 / 4 + i]);
  EXPECT_FALSE(sys.adapter(0).dma_error(txn));
}

TEST(Adapter, MmioRegisters) {
  auto a = make_na(3);
  std::vector<std::uint32_t> mem(64);
  EXPECT_EQ(a.mmio_access(na::reg::kTileId, false, 0, mem).value, 3u);
  EXPECT_EQ(a.mmio_access(na::reg::kNumTiles, false, 0, mem).value, 4u);
  EXPECT_EQ(a.mmio_access(na::reg::kRecvWord, false, 0, mem).status, pe::BusResult::Status::Stall);
  EXPECT_EQ(a.mmio_access(0xFC, false, 0, mem).status, pe::BusResult::Status::Fault);
}

TEST(Adapter, SendGoInjectsNextCycle) {
  auto sys = idle_system(2, 2);
  auto mem = sys.memory(0);
  auto& a = sys.adapter(0);
  a.mmio_access(na::reg::kSendDestTile, true, 3, mem);
  a.mmio_access(na::reg::kSendDestPort, true, 2, mem);
  a.mmio_access(na::reg::kSendLen, true, 0, mem);
  a.mmio_access(na::reg::kSendGoStatus, true, 1, mem);
  EXPECT_TRUE(a.send_busy());
  tick_until(sys, [&] { return sys.adapter(3).queue_length(2) == 1; });
  EXPECT_FALSE(sys.adapter(0).send_busy());
}

TEST(Lsu, Examples) {
  using K = na::Translation::Kind;
  constexpr std::uint32_t part = 64 * 1024;
  EXPECT_EQ(na::lsu_translate(0x00020010, 2, part, 4), (na::Translation{K::Local, 2, 0x10}));
  EXPECT_EQ(na::lsu_translate(0x00020010, 0, part, 4), (na::Translation{K::Remote, 2, 0x10}));
  EXPECT_EQ(na::lsu_translate(0x00040000, 0, part, 4).kind, K::Fault);
}

TEST(Pgas, RemoteLoadAndStoreThroughCores) {
  platform::PlatformDescription d;
  d.width = 2;
  d.height = 2;
  d.org = platform::MemoryOrg::Pgas;
  d.partition_kib = 64;
  d.debug_enabled = false;
  const auto cfg = platform::map_description(d);
  const auto prog = pe::assemble(R"(
      LUI  r1, 2          ; tile 2 partition
      LW   r2, 0x10(r1)
      ADDI r2, r2, 1
      SW   r2, 0x14(r1)
      LUI  r3, 4          ; past the last partition
      LW   r4, 0(r3)
      HALT
  )");
  auto sys = platform::map_configuration(cfg, {{0, prog}});
  sys.memory(2)[0x10 / 4] = 41;
  sys.run(10000);
  EXPECT_EQ(sys.core(0).regs[2], 42u);
  EXPECT_EQ(sys.memory(2)[0x14 / 4], 42u);
  ASSERT_TRUE(sys.core(0).fault);
  EXPECT_EQ(sys.core(0).fault->kind, pe::FaultKind::MemoryFault);
  EXPECT_EQ(sys.core(0).fault->addr, 0x40000u);
}

TEST(Adapter, MessageSoakIsLossless) {
  auto sys = idle_system(3, 3);
  std::mt19937_64 rng(5);
  struct Sent {
    noc::TileId src;
    std::uint8_t port;
    std::vector<std::uint32_t> payload;
  };
  std::map<std::pair<noc::TileId, std::uint8_t>, std::deque<Sent>> expect;  // by destination endpoint
  std::size_t sent = 0, received = 0;
  for (int cycle = 0; cycle < 40000; ++cycle) {
    for (noc::TileId t = 0; t < 9 && sent < 600; ++t) {
      if (rng() % 20 != 0 || sys.adapter(t).send_busy()) continue;
      const na::Endpoint dst{static_cast<noc::TileId>(rng() % 9), static_cast<std::uint8_t>(rng() % 16)};
      std::vector<std::uint32_t> p(rng() % 33);
      for (auto& w : p) w = static_cast<std::uint32_t>(rng());
      const auto port = static_cast<std::uint8_t>(rng() % 16);
      ASSERT_EQ(sys.adapter(t).send(port, dst, p), na::SendStatus::Ok);
      expect[{dst.tile, dst.port}].push_back({t, port, p});
      ++sent;
    }
    sys.tick();
    for (noc::TileId t = 0; t < 9; ++t) {
      for (std::uint8_t port = 0; port < 16; ++port) {
        while (auto m = sys.adapter(t).receive(port)) {
          auto& q = expect[{t, port}];
          // Different senders may interleave; match the oldest from this sender.
          const auto it = std::find_if(q.begin(), q.end(), [&](const Sent& s) { return s.src == m->src_tile; });
          ASSERT_NE(it, q.end());
          EXPECT_EQ(it->port, m->src_port);
          EXPECT_EQ(it->payload, m->payload);
          q.erase(it);
          ++received;
        }
      }
    }
  }
  std::uint64_t dropped = 0;
  for (noc::TileId t = 0; t < 9; ++t) dropped += sys.adapter(t).stats().messages_dropped;
  EXPECT_EQ(sent, 600u);
  EXPECT_EQ(received + dropped, sent);
}
