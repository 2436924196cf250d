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
 * @file router.hpp
 * @brief Input-buffered wormhole router with per-class virtual channels.
 *
 * One call to Router::tick() is one cycle:
 *   1. every output port grants at most one flit, chosen round-robin over
 *      (input port, VC) pairs whose front flit is routed to it, whose output
 *      VC is free or owned by that input, and which hold a credit;
 *   2. granted flits leave their FIFOs; a credit per popped flit is handed
 *      back to the upstream sender;
 *   3. this cycle's arrivals are written into the input FIFOs and returned
 *      credits are added to the output counters.
 *
 * A flit written in cycle t can therefore depart in cycle t+1 at the
 * earliest. The Local output always accepts (the network adapter sinks).
 */
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tilesim/noc/flit.hpp"

namespace tilesim::noc {

enum class Port : std::uint8_t { North = 0, East = 1, South = 2, West = 3, Local = 4 };

inline constexpr int kNumPorts = 5;

const char* to_string(Port p);
Port opposite(Port p);

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

/// X-then-Y dimension-order routing; y grows southward.
Port route_xy(Coord current, Coord dest);

struct RouterParams {
  int vcs = 3;
  int buffer_depth = 4;
  friend bool operator==(const RouterParams&, const RouterParams&) = default;
};

class BufferOverflow : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-VC bitmask, one bit per returned credit.
using CreditMask = std::uint32_t;

struct RouterTickInput {
  std::array<std::optional<Flit>, kNumPorts> arrivals{};
  std::array<CreditMask, kNumPorts> credit_returns{};  // indexed by output port
};

struct RouterTickOutput {
  std::array<std::optional<Flit>, kNumPorts> departures{};  // indexed by output port
  std::array<CreditMask, kNumPorts> credits_granted{};     // indexed by input port
};

class Router {
 public:
  /// `mesh_width` maps destination tile ids to coordinates (row-major).
  /// Outputs that are not connected start with zero credits.
  Router(Coord coord, int mesh_width, RouterParams params,
         std::array<bool, kNumPorts> connected);

  RouterTickOutput tick(const RouterTickInput& in);

  Coord coord() const { return coord_; }
  const RouterParams& params() const { return params_; }

  std::size_t occupancy(Port in, int vc) const { return fifo(in, vc).size(); }
  const std::deque<Flit>& fifo(Port in, int vc) const {
    return inputs_[index(in)][static_cast<std::size_t>(vc)];
  }
  int credits(Port out, int vc) const { return credits_[index(out)][static_cast<std::size_t>(vc)]; }
  std::optional<Port> owner(Port out, int vc) const {
    return owner_[index(out)][static_cast<std::size_t>(vc)];
  }
  std::size_t buffered_flits() const;

  friend bool operator==(const Router&, const Router&) = default;

 private:
  static std::size_t index(Port p) { return static_cast<std::size_t>(p); }
  std::optional<Port> requested_output(Port in, int vc) const;
  bool eligible(Port in, int vc, Port out) const;

  Coord coord_;
  int mesh_width_;
  RouterParams params_;
  std::array<bool, kNumPorts> connected_;

  std::array<std::vector<std::deque<Flit>>, kNumPorts> inputs_;
  // Output a packet at the front of an input VC is bound to, set by its header.
  std::array<std::vector<std::optional<Port>>, kNumPorts> bound_output_;
  std::array<std::vector<int>, kNumPorts> credits_;
  std::array<std::vector<std::optional<Port>>, kNumPorts> owner_;
  std::array<std::size_t, kNumPorts> rr_next_{};
};

}  // namespace tilesim::noc
