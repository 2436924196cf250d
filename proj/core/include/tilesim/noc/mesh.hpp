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
 * @file mesh.hpp
 * @brief Width x height mesh of routers with one-cycle links.
 *
 * Links are registers: a flit leaving a router in cycle t is written into
 * the neighbour's input FIFO in cycle t+1, and a credit granted in cycle t
 * reaches the upstream counter in cycle t+1. Credits for the local input are
 * handed to the network adapter at the end of the cycle that freed them.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tilesim/noc/router.hpp"

namespace tilesim::noc {

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using PortCounts = std::array<std::uint64_t, kNumPorts>;

class MeshNetwork {
 public:
  MeshNetwork(int width, int height, RouterParams params = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return routers_.size(); }
  std::uint64_t cycle() const { return cycle_; }

  Coord coord_of(TileId tile) const {
    return {static_cast<int>(tile) % width_, static_cast<int>(tile) / width_};
  }
  TileId tile_at(Coord c) const { return static_cast<TileId>(c.y * width_ + c.x); }

  bool can_inject(TileId tile, int vc) const;

  /// Advances every router by one cycle on the pre-tick state. `injections`
  /// holds at most one flit per tile and must respect can_inject(). Returns
  /// the flit ejected at each tile's local port this cycle, if any.
  std::vector<std::optional<Flit>> tick(std::span<const std::optional<Flit>> injections);

  /// Throws InvariantViolation unless flit conservation and credit soundness
  /// hold. Credit soundness here means: for every link and VC, the sender's
  /// credits plus the receiver's occupancy plus flits and credits still on
  /// the wire equal the buffer depth.
  void check_invariants() const;

  const Router& router(TileId r) const { return routers_.at(r); }

  /// Departures per output port during the most recent tick (0 or 1 each).
  const std::vector<std::array<std::uint8_t, kNumPorts>>& last_departures() const {
    return last_departures_;
  }
  const std::vector<PortCounts>& total_departures() const { return total_departures_; }

  std::uint64_t flits_injected() const { return flits_injected_; }
  std::uint64_t flits_ejected() const { return flits_ejected_; }
  std::uint64_t flits_in_flight() const;

  friend bool operator==(const MeshNetwork&, const MeshNetwork&) = default;

 private:
  std::optional<TileId> neighbor(TileId r, Port p) const;

  int width_;
  int height_;
  RouterParams params_;
  std::uint64_t cycle_ = 0;
  std::vector<Router> routers_;
  // Per router and output port: flit on the link toward the neighbour.
  std::vector<std::array<std::optional<Flit>, kNumPorts>> link_flits_;
  // Per router and input port: credits on the wire toward the upstream sender.
  std::vector<std::array<CreditMask, kNumPorts>> link_credits_;
  // Per tile and VC: credits the network adapter holds for the local input.
  std::vector<std::vector<int>> local_credits_;
  std::vector<std::array<std::uint8_t, kNumPorts>> last_departures_;
  std::vector<PortCounts> total_departures_;
  std::uint64_t flits_injected_ = 0;
  std::uint64_t flits_ejected_ = 0;
};

}  // namespace tilesim::noc
