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
 * @file adapter.hpp
 * @brief Per-tile network adapter: endpoint messaging, DMA and PGAS access.
 *
 * Wire formats (body words of the NoC packet):
 *
 *   MSG   [desc, payload...]      desc = synth<<31 | src_port<<24 | dst_port<<16 | len
 *   REQ   [op, remote_addr, data...]
 *                                 op = write<<31 | tag<<24 | segment<<16 | nwords
 *   RESP  read:  [op', data...]   op' = error<<31 | tag<<24 | segment<<16 | nwords
 *         write: []               (ack, a Single flit)
 *
 * Responses are matched to requests in order per remote tile: requests to
 * one tile travel one deterministic path, are serviced in arrival order and
 * their responses return along one path as well.
 */
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tilesim/noc/flit.hpp"
#include "tilesim/noc/mesh.hpp"
#include "tilesim/pe/core.hpp"

namespace tilesim::na {

using noc::TileId;

inline constexpr int kNumEndpointPorts = 16;
inline constexpr std::size_t kMaxMessageWords = noc::kMaxPayloadWords;
inline constexpr std::uint32_t kMaxDmaWords = 1024;
inline constexpr std::uint32_t kDmaSegmentWords = 32;
inline constexpr std::uint8_t kPgasTag = 0x7F;

struct Endpoint {
  TileId tile = 0;
  std::uint8_t port = 0;
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct NaParams {
  TileId tile = 0;
  std::uint32_t num_tiles = 1;
  std::uint32_t memory_bytes = 64 * 1024;
  std::uint32_t recv_queue_depth = 16;
  std::uint32_t max_dma_inflight = 8;
  std::uint32_t partition_bytes = 0;  // 0: distributed-memory tile (no PGAS)
  friend bool operator==(const NaParams&, const NaParams&) = default;
};

struct Message {
  TileId src_tile = 0;
  std::uint8_t src_port = 0;
  std::vector<std::uint32_t> payload;
  friend bool operator==(const Message&, const Message&) = default;
};

enum class SendStatus : std::uint8_t { Ok, Busy, LenRange, BadDest };

enum class DmaDir : std::uint8_t { ReadRemote = 0, WriteRemote = 1 };

class NoFreeSlot : public std::runtime_error {
 public:
  NoFreeSlot() : std::runtime_error("no free DMA transaction slot") {}
};

class DmaRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Things the debug fabric wants to hear about.
struct NaEvent {
  enum class Kind : std::uint8_t { UnknownPort, DmaDone } kind;
  std::uint32_t a = 0;  // UnknownPort: source tile; DmaDone: txn id
  std::uint32_t b = 0;  // UnknownPort: port;        DmaDone: remote tile
  std::uint32_t c = 0;  //                           DmaDone: length in words
  friend bool operator==(const NaEvent&, const NaEvent&) = default;
};

struct NaStats {
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_received = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t synthetic_sent = 0;
  std::uint64_t synthetic_received = 0;
  std::uint64_t requests_serviced = 0;
  std::uint64_t dma_completed = 0;
  std::uint64_t packets_injected = 0;
  friend bool operator==(const NaStats&, const NaStats&) = default;
};

/// Builds the MSG packet for one endpoint message.
noc::Packet message_packet(TileId src_tile, std::uint8_t src_port, Endpoint dst,
                           std::span<const std::uint32_t> payload, bool synthetic = false);

class NetworkAdapter {
 public:
  explicit NetworkAdapter(NaParams params);

  const NaParams& params() const { return params_; }
  const NaStats& stats() const { return stats_; }

  // Services

  SendStatus send(std::uint8_t src_port, Endpoint dst, std::span<const std::uint32_t> payload);
  /// Background traffic: a MSG packet that the receiving adapter counts and drops.
  void send_synthetic(TileId dst, std::span<const std::uint32_t> payload);
  bool send_busy() const { return send_pending_; }

  /// Starts a transfer and returns its transaction id. A zero-length
  /// transfer completes immediately without traffic.
  std::uint32_t dma_start(DmaDir dir, std::uint32_t local_addr, TileId remote_tile,
                          std::uint32_t remote_addr, std::uint32_t len_words,
                          std::span<const std::uint32_t> mem);
  bool dma_done(std::uint32_t txn) const { return (dma_done_mask_ >> txn) & 1u; }
  bool dma_error(std::uint32_t txn) const { return (dma_error_mask_ >> txn) & 1u; }
  std::size_t dma_in_flight() const;

  std::size_t queue_length(std::uint8_t port) const { return recv_.at(port).size(); }
  bool overflowed(std::uint8_t port) const { return overflow_.at(port); }
  std::optional<Message> receive(std::uint8_t port);

  // Core side

  /// Register access; `offset` is relative to the MMIO base.
  pe::BusResult mmio_access(std::uint32_t offset, bool is_write, std::uint32_t value,
                            std::span<const std::uint32_t> mem);
  /// Data access on a PGAS tile. Remote accesses stall until the response.
  pe::BusResult pgas_access(std::uint32_t addr, bool is_write, std::uint32_t value,
                            std::span<std::uint32_t> mem);

  // Network side

  /// Picks this cycle's injection flit (at most one) and removes it from the
  /// outbound queues.
  std::optional<noc::Flit> next_injection(const noc::MeshNetwork& net);
  /// Accepts one ejected flit; complete packets are delivered.
  void on_ejected(const noc::Flit& flit, std::span<std::uint32_t> mem);
  void deliver(const noc::Packet& packet, std::span<std::uint32_t> mem);

  bool idle() const;
  /// Packets queued for injection, all classes.
  std::size_t outbound_backlog() const {
    return outbound_[0].size() + outbound_[1].size() + outbound_[2].size();
  }
  std::vector<NaEvent> take_events() { return std::exchange(events_, {}); }

  friend bool operator==(const NetworkAdapter&, const NetworkAdapter&) = default;

 private:
  struct Outbound {
    std::vector<noc::Flit> flits;
    std::size_t next = 0;
    bool core_send = false;
    friend bool operator==(const Outbound&, const Outbound&) = default;
  };
  struct DmaSlot {
    bool active = false;
    DmaDir dir = DmaDir::ReadRemote;
    std::uint32_t local_addr = 0;
    TileId remote_tile = 0;
    std::uint32_t len = 0;
    std::uint32_t segments = 0;
    std::uint32_t segments_done = 0;
    friend bool operator==(const DmaSlot&, const DmaSlot&) = default;
  };
  struct Outstanding {
    std::uint8_t tag = 0;
    std::uint8_t segment = 0;
    bool write = false;
    friend bool operator==(const Outstanding&, const Outstanding&) = default;
  };
  struct PgasPending {
    std::uint32_t addr = 0;
    bool write = false;
    bool ready = false;
    std::uint32_t value = 0;
    friend bool operator==(const PgasPending&, const PgasPending&) = default;
  };

  void enqueue(const noc::Packet& p, bool core_send = false);
  void issue_request(TileId remote, bool write, std::uint8_t tag, std::uint8_t segment,
                     std::uint32_t remote_addr, std::span<const std::uint32_t> data,
                     std::uint32_t nwords);
  void deliver_message(const noc::Packet& p);
  void service_request(const noc::Packet& p, std::span<std::uint32_t> mem);
  void complete_response(const noc::Packet& p, std::span<std::uint32_t> mem);
  void finish_segment(std::uint8_t slot);
  pe::BusResult recv_word(std::uint8_t port);
  pe::BusResult start_from_registers(std::span<const std::uint32_t> mem);

  NaParams params_;
  NaStats stats_;

  // Send staging registers.
  std::uint32_t send_dest_tile_ = 0;
  std::uint32_t send_dest_port_ = 0;
  std::uint32_t send_src_port_ = 0;
  std::uint32_t send_len_ = 0;
  std::uint32_t send_addr_ = 0;
  std::uint32_t send_errors_ = 0;
  bool send_pending_ = false;
  std::uint32_t sticky_status_ = 0;

  std::array<std::deque<Message>, kNumEndpointPorts> recv_;
  std::array<bool, kNumEndpointPorts> overflow_{};
  std::array<std::uint32_t, kNumEndpointPorts> recv_cursor_{};

  // DMA registers and transaction table.
  std::uint32_t dma_local_addr_ = 0;
  std::uint32_t dma_remote_tile_ = 0;
  std::uint32_t dma_remote_addr_ = 0;
  std::uint32_t dma_len_ = 0;
  std::uint32_t dma_dir_ = 0;
  std::uint32_t dma_last_start_ = reg_start_none();
  std::uint32_t dma_start_errors_ = 0;
  std::vector<DmaSlot> dma_;
  std::uint32_t dma_done_mask_ = 0;
  std::uint32_t dma_error_mask_ = 0;

  std::optional<PgasPending> pgas_;
  std::map<TileId, std::deque<Outstanding>> outstanding_;

  std::array<std::deque<Outbound>, noc::kNumClasses> outbound_;
  std::size_t inject_rr_ = 0;
  std::array<std::vector<noc::Flit>, noc::kNumClasses> reassembly_;
  std::vector<NaEvent> events_;

  static constexpr std::uint32_t reg_start_none() { return 0xFFFF'FFFFu; }
};

}  // namespace tilesim::na
