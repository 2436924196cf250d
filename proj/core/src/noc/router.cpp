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

#include "tilesim/noc/router.hpp"

#include <limits>
#include <string>

namespace tilesim::noc {

namespace {
constexpr int kUnlimitedCredits = std::numeric_limits<int>::max();
}

const char* to_string(Port p) {
  switch (p) {
    case Port::North: return "N";
    case Port::East: return "E";
    case Port::South: return "S";
    case Port::West: return "W";
    case Port::Local: return "L";
  }
  return "?";
}

Port opposite(Port p) {
  switch (p) {
    case Port::North: return Port::South;
    case Port::East: return Port::West;
    case Port::South: return Port::North;
    case Port::West: return Port::East;
    case Port::Local: return Port::Local;
  }
  return Port::Local;
}

Port route_xy(Coord current, Coord dest) {
  if (dest.x > current.x) return Port::East;
  if (dest.x < current.x) return Port::West;
  if (dest.y > current.y) return Port::South;
  if (dest.y < current.y) return Port::North;
  return Port::Local;
}

Router::Router(Coord coord, int mesh_width, RouterParams params,
               std::array<bool, kNumPorts> connected)
    : coord_(coord), mesh_width_(mesh_width), params_(params), connected_(connected) {
  if (params.vcs < kNumClasses || params.vcs > 32) {
    throw std::invalid_argument("router needs between 3 and 32 virtual channels");
  }
  if (params.buffer_depth < 1) throw std::invalid_argument("buffer depth must be positive");
  const auto vcs = static_cast<std::size_t>(params.vcs);
  for (std::size_t p = 0; p < kNumPorts; ++p) {
    inputs_[p].resize(vcs);
    bound_output_[p].resize(vcs);
    owner_[p].resize(vcs);
    int initial = 0;
    if (p == index(Port::Local)) {
      initial = kUnlimitedCredits;
    } else if (connected_[p]) {
      initial = params.buffer_depth;
    }
    credits_[p].assign(vcs, initial);
  }
}

std::size_t Router::buffered_flits() const {
  std::size_t n = 0;
  for (const auto& port : inputs_) {
    for (const auto& q : port) n += q.size();
  }
  return n;
}

std::optional<Port> Router::requested_output(Port in, int vc) const {
  const auto& q = fifo(in, vc);
  if (q.empty()) return std::nullopt;
  const auto& front = q.front();
  if (front.is_head()) {
    const auto dst = decode_header(front.payload).dst;
    const Coord dest{static_cast<int>(dst) % mesh_width_, static_cast<int>(dst) / mesh_width_};
    return route_xy(coord_, dest);
  }
  const auto bound = bound_output_[index(in)][static_cast<std::size_t>(vc)];
  if (!bound) throw std::logic_error("body flit at the front of an unbound input VC");
  return bound;
}

bool Router::eligible(Port in, int vc, Port out) const {
  const auto want = requested_output(in, vc);
  if (!want || *want != out) return false;
  if (credits(out, vc) <= 0) return false;
  const auto own = owner(out, vc);
  if (fifo(in, vc).front().is_head()) return !own.has_value();
  return own == in;
}

RouterTickOutput Router::tick(const RouterTickInput& in) {
  RouterTickOutput out;
  const auto vcs = static_cast<std::size_t>(params_.vcs);
  const std::size_t candidates = kNumPorts * vcs;

  struct Grant {
    Port in;
    int vc;
  };
  std::array<std::optional<Grant>, kNumPorts> grants{};

  // Phase 1: arbitration on the pre-tick state only.
  for (std::size_t o = 0; o < kNumPorts; ++o) {
    const auto out_port = static_cast<Port>(o);
    for (std::size_t k = 0; k < candidates; ++k) {
      const std::size_t c = (rr_next_[o] + k) % candidates;
      const auto in_port = static_cast<Port>(c / vcs);
      const int vc = static_cast<int>(c % vcs);
      if (eligible(in_port, vc, out_port)) {
        grants[o] = Grant{in_port, vc};
        rr_next_[o] = (c + 1) % candidates;
        break;
      }
    }
  }

  // Phase 2: traversal.
  for (std::size_t o = 0; o < kNumPorts; ++o) {
    if (!grants[o]) continue;
    const auto [in_port, vc] = *grants[o];
    const auto v = static_cast<std::size_t>(vc);
    auto& q = inputs_[index(in_port)][v];
    const Flit f = q.front();
    q.pop_front();

    if (f.kind == FlitKind::Header) {
      owner_[o][v] = in_port;
      bound_output_[index(in_port)][v] = static_cast<Port>(o);
    }
    if (f.kind == FlitKind::Tail) {
      owner_[o][v].reset();
      bound_output_[index(in_port)][v].reset();
    }
    if (o != index(Port::Local)) --credits_[o][v];
    out.credits_granted[index(in_port)] |= CreditMask{1} << vc;
    out.departures[o] = f;
  }

  // Phase 3: link arrivals and credit returns land.
  for (std::size_t p = 0; p < kNumPorts; ++p) {
    if (const auto& f = in.arrivals[p]) {
      if (f->vc >= vcs) throw BufferOverflow("flit on nonexistent VC " + std::to_string(f->vc));
      auto& q = inputs_[p][f->vc];
      if (q.size() >= static_cast<std::size_t>(params_.buffer_depth)) {
        throw BufferOverflow("input FIFO overflow at router (" + std::to_string(coord_.x) + "," +
                             std::to_string(coord_.y) + ") port " + to_string(static_cast<Port>(p)));
      }
      q.push_back(*f);
    }
    const auto mask = in.credit_returns[p];
    if (mask == 0 || p == index(Port::Local)) continue;
    for (std::size_t v = 0; v < vcs; ++v) {
      if ((mask >> v) & 1u) {
        if (++credits_[p][v] > params_.buffer_depth) {
          throw BufferOverflow("credit counter exceeds downstream depth");
        }
      }
    }
  }
  return out;
}

}  // namespace tilesim::noc
