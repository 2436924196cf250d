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
 * @file ring.hpp
 * @brief Unidirectional 16-bit ring used by the debug fabric.
 *
 * Node i forwards to node (i+1) mod N, one flit per link per cycle. The
 * first flit of every packet is an address word, `dest << 8 | src`; dest
 * 0xFF broadcasts (every other node gets a copy, the source consumes it
 * after the full loop). A packet addressed to its own source also travels
 * the full loop.
 *
 * Each node holds four wormhole FIFOs: {data, trigger} lanes times
 * {before, after} a dateline at node 0. A packet crossing from node N-1 into
 * node 0 moves to the "after" FIFO of its lane, which breaks the cyclic
 * buffer dependency of a ring. Trigger lanes win every link arbitration so a
 * lone broadcast advances one hop per cycle regardless of data traffic.
 */
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace tilesim::noc {

inline constexpr std::uint8_t kRingBroadcast = 0xFF;

enum class RingLane : std::uint8_t { Data = 0, Trigger = 1 };

struct RingFlit {
  std::uint16_t data = 0;
  bool tail = false;
  friend bool operator==(const RingFlit&, const RingFlit&) = default;
};

struct RingInjection {
  RingFlit flit;
  RingLane lane = RingLane::Data;
};

struct RingDelivery {
  std::size_t node = 0;
  RingLane lane = RingLane::Data;
  std::vector<std::uint16_t> flits;
  friend bool operator==(const RingDelivery&, const RingDelivery&) = default;
};

struct RingTickResult {
  std::vector<RingDelivery> deliveries;
  std::vector<bool> accepted;  // per node: was the offered injection taken
};

class RingNetwork {
 public:
  explicit RingNetwork(std::size_t nodes, std::size_t fifo_depth = 4);

  std::size_t size() const { return nodes_.size(); }
  std::size_t fifo_depth() const { return depth_; }
  std::uint64_t ticks() const { return ticks_; }

  /// One cycle. `offers` holds at most one flit per node (empty span: none).
  /// An offer is taken when the node's injection FIFO has space and no
  /// through packet holds or claims its input; rejected flits must be
  /// offered again.
  RingTickResult tick(std::span<const std::optional<RingInjection>> offers);

  bool idle() const;
  std::size_t occupancy(std::size_t node) const;

  friend bool operator==(const RingNetwork&, const RingNetwork&) = default;

 private:
  static constexpr std::size_t kFifos = 4;
  enum class Owner : std::uint8_t { None, Through, Local };

  struct Stream {
    bool at_head = true;  // next flit starts a packet
    std::uint8_t dest = 0;
    std::uint8_t src = 0;
    friend bool operator==(const Stream&, const Stream&) = default;
  };

  struct Node {
    std::array<std::deque<RingFlit>, kFifos> fifo;
    std::array<Owner, kFifos> owner{};
    std::array<Stream, kFifos> out_stream{};  // packet leaving each FIFO
    std::array<std::vector<std::uint16_t>, kFifos> reassembly;  // keyed by upstream FIFO
    friend bool operator==(const Node&, const Node&) = default;
  };

  static std::size_t fifo_index(RingLane lane, bool after_dateline) {
    return static_cast<std::size_t>(lane) * 2 + (after_dateline ? 1 : 0);
  }

  std::size_t depth_;
  std::uint64_t ticks_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace tilesim::noc
