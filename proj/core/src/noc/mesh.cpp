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

#include "tilesim/noc/mesh.hpp"

#include <string>

namespace tilesim::noc {

MeshNetwork::MeshNetwork(int width, int height, RouterParams params)
    : width_(width), height_(height), params_(params) {
  if (width < 1 || height < 1) throw std::invalid_argument("mesh dimensions must be positive");
  if (static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height) > kMaxTiles) {
    throw std::invalid_argument("mesh too large");
  }
  const auto n = static_cast<std::size_t>(width * height);
  routers_.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = coord_of(static_cast<TileId>(r));
    std::array<bool, kNumPorts> connected{};
    connected[static_cast<std::size_t>(Port::North)] = c.y > 0;
    connected[static_cast<std::size_t>(Port::East)] = c.x + 1 < width;
    connected[static_cast<std::size_t>(Port::South)] = c.y + 1 < height;
    connected[static_cast<std::size_t>(Port::West)] = c.x > 0;
    connected[static_cast<std::size_t>(Port::Local)] = true;
    routers_.emplace_back(c, width, params, connected);
  }
  link_flits_.resize(n);
  link_credits_.resize(n);
  local_credits_.assign(n, std::vector<int>(static_cast<std::size_t>(params.vcs), params.buffer_depth));
  last_departures_.resize(n);
  total_departures_.resize(n);
}

std::optional<TileId> MeshNetwork::neighbor(TileId r, Port p) const {
  auto c = coord_of(r);
  switch (p) {
    case Port::North: --c.y; break;
    case Port::East: ++c.x; break;
    case Port::South: ++c.y; break;
    case Port::West: --c.x; break;
    case Port::Local: return std::nullopt;
  }
  if (c.x < 0 || c.y < 0 || c.x >= width_ || c.y >= height_) return std::nullopt;
  return tile_at(c);
}

bool MeshNetwork::can_inject(TileId tile, int vc) const {
  return local_credits_.at(tile).at(static_cast<std::size_t>(vc)) > 0;
}

std::uint64_t MeshNetwork::flits_in_flight() const {
  std::uint64_t n = 0;
  for (std::size_t r = 0; r < routers_.size(); ++r) {
    n += routers_[r].buffered_flits();
    for (const auto& f : link_flits_[r]) n += f.has_value() ? 1 : 0;
  }
  return n;
}

std::vector<std::optional<Flit>> MeshNetwork::tick(std::span<const std::optional<Flit>> injections) {
  const auto n = routers_.size();
  if (injections.size() != n && !injections.empty()) {
    throw std::invalid_argument("one injection slot per tile expected");
  }
  constexpr auto kLocal = static_cast<std::size_t>(Port::Local);

  std::vector<RouterTickInput> inputs(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto& in = inputs[r];
    for (std::size_t p = 0; p < kLocal; ++p) {
      const auto port = static_cast<Port>(p);
      const auto nb = neighbor(static_cast<TileId>(r), port);
      if (!nb) continue;
      const auto back = static_cast<std::size_t>(opposite(port));
      in.arrivals[p] = link_flits_[*nb][back];
      in.credit_returns[p] = link_credits_[*nb][back];
    }
    if (!injections.empty() && injections[r]) {
      const auto& f = *injections[r];
      auto& credit = local_credits_[r].at(f.vc);
      if (credit <= 0) throw BufferOverflow("injection without a local credit at tile " + std::to_string(r));
      --credit;
      ++flits_injected_;
      in.arrivals[kLocal] = f;
    }
  }

  std::vector<std::optional<Flit>> ejections(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto out = routers_[r].tick(inputs[r]);
    for (std::size_t o = 0; o < kNumPorts; ++o) {
      const bool departed = out.departures[o].has_value();
      last_departures_[r][o] = departed ? 1 : 0;
      total_departures_[r][o] += departed ? 1 : 0;
    }
    for (std::size_t o = 0; o < kLocal; ++o) link_flits_[r][o] = out.departures[o];
    if (out.departures[kLocal]) {
      ejections[r] = out.departures[kLocal];
      ++flits_ejected_;
    }
    for (std::size_t p = 0; p < kLocal; ++p) link_credits_[r][p] = out.credits_granted[p];
    const auto local_mask = out.credits_granted[kLocal];
    for (std::size_t v = 0; v < local_credits_[r].size(); ++v) {
      if ((local_mask >> v) & 1u) ++local_credits_[r][v];
    }
  }
  ++cycle_;
#ifdef TILESIM_INVARIANT_CHECKS
  check_invariants();
#endif
  return ejections;
}

void MeshNetwork::check_invariants() const {
  if (flits_injected_ != flits_ejected_ + flits_in_flight()) {
    throw InvariantViolation("flit conservation violated at cycle " + std::to_string(cycle_));
  }
  const auto depth = params_.buffer_depth;
  const auto vcs = params_.vcs;
  for (std::size_t r = 0; r < routers_.size(); ++r) {
    const auto& router = routers_[r];
    for (int v = 0; v < vcs; ++v) {
      const auto occ = static_cast<int>(router.occupancy(Port::Local, v));
      if (local_credits_[r][static_cast<std::size_t>(v)] + occ != depth) {
        throw InvariantViolation("local credit mismatch at router " + std::to_string(r));
      }
      if (occ > depth) throw InvariantViolation("FIFO above depth");
    }
    for (std::size_t o = 0; o < static_cast<std::size_t>(Port::Local); ++o) {
      const auto port = static_cast<Port>(o);
      const auto nb = neighbor(static_cast<TileId>(r), port);
      if (!nb) continue;
      const auto back = opposite(port);
      const auto& down = routers_[*nb];
      for (int v = 0; v < vcs; ++v) {
        const auto& wire = link_flits_[r][o];
        const int on_link = (wire && wire->vc == v) ? 1 : 0;
        const int credit_on_wire =
            static_cast<int>((link_credits_[*nb][static_cast<std::size_t>(back)] >> v) & 1u);
        const int occ = static_cast<int>(down.occupancy(back, v));
        const int credits = router.credits(port, v);
        if (credits < 0 || credits + occ + on_link + credit_on_wire != depth) {
          throw InvariantViolation("credit soundness violated on link " + std::to_string(r) + ":" +
                                   to_string(port) + " vc " + std::to_string(v) + " at cycle " +
                                   std::to_string(cycle_));
        }
      }
    }
  }
}

}  // namespace tilesim::noc
