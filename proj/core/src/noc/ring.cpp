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

#include "tilesim/noc/ring.hpp"

#include <stdexcept>

namespace tilesim::noc {

namespace {

enum class Action : std::uint8_t { Consume, Forward, CopyForward };

struct Move {
  std::size_t from_fifo;
  Action action;
  std::size_t to_fifo;
};

RingLane lane_of(std::size_t fifo) { return static_cast<RingLane>(fifo / 2); }
bool after_dateline(std::size_t fifo) { return (fifo & 1u) != 0; }

// Link arbitration order: trigger lanes first, then the data lanes.
constexpr std::array<std::size_t, 4> kPriority = {3, 2, 1, 0};

}  // namespace

RingNetwork::RingNetwork(std::size_t nodes, std::size_t fifo_depth)
    : depth_(fifo_depth), nodes_(nodes) {
  if (nodes < 1 || nodes > 255) throw std::invalid_argument("ring needs 1..255 nodes");
  if (fifo_depth < 1) throw std::invalid_argument("ring FIFO depth must be positive");
}

bool RingNetwork::idle() const {
  for (const auto& n : nodes_) {
    for (std::size_t k = 0; k < kFifos; ++k) {
      if (!n.fifo[k].empty() || !n.reassembly[k].empty()) return false;
    }
  }
  return true;
}

std::size_t RingNetwork::occupancy(std::size_t node) const {
  std::size_t total = 0;
  for (const auto& q : nodes_.at(node).fifo) total += q.size();
  return total;
}

RingTickResult RingNetwork::tick(std::span<const std::optional<RingInjection>> offers) {
  const auto n = nodes_.size();
  if (!offers.empty() && offers.size() != n) throw std::invalid_argument("one offer slot per ring node");

  RingTickResult result;
  result.accepted.assign(n, false);
  std::vector<std::optional<Move>> moves(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto j = (i + 1) % n;
    const auto& node = nodes_[i];
    for (const auto k : kPriority) {
      const auto& q = node.fifo[k];
      if (q.empty()) continue;
      auto stream = node.out_stream[k];
      if (stream.at_head) {
        stream.dest = static_cast<std::uint8_t>(q.front().data >> 8);
        stream.src = static_cast<std::uint8_t>(q.front().data & 0xFF);
      }
      Action action = Action::Forward;
      if (stream.dest == kRingBroadcast) {
        action = (stream.src == j) ? Action::Consume : Action::CopyForward;
      } else if (stream.dest == j) {
        action = Action::Consume;
      }
      std::size_t target = 0;
      if (action != Action::Consume) {
        if (j == 0 && after_dateline(k)) throw std::logic_error("ring packet crossed the dateline twice");
        target = fifo_index(lane_of(k), j == 0 || after_dateline(k));
        const auto& down = nodes_[j];
        if (down.fifo[target].size() >= depth_) continue;
        const auto owner = down.owner[target];
        const bool may_enter = owner == Owner::Through || (owner == Owner::None && stream.at_head);
        if (!may_enter) continue;
      }
      moves[i] = Move{k, action, target};
      break;
    }
  }

  for (std::size_t j = 0; j < n && !offers.empty(); ++j) {
    if (!offers[j]) continue;
    const auto target = fifo_index(offers[j]->lane, false);
    const auto& node = nodes_[j];
    const auto& up = moves[(j + n - 1) % n];
    const bool through_claims = up && up->action != Action::Consume && up->to_fifo == target;
    const auto owner = node.owner[target];
    result.accepted[j] = node.fifo[target].size() < depth_ &&
                         (owner == Owner::Local || (owner == Owner::None && !through_claims));
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!moves[i]) continue;
    const auto j = (i + 1) % n;
    const auto [k, action, target] = *moves[i];
    auto& src_node = nodes_[i];
    const RingFlit f = src_node.fifo[k].front();
    src_node.fifo[k].pop_front();
    auto& stream = src_node.out_stream[k];
    if (stream.at_head) {
      stream.dest = static_cast<std::uint8_t>(f.data >> 8);
      stream.src = static_cast<std::uint8_t>(f.data & 0xFF);
      stream.at_head = false;
    }
    if (f.tail) stream.at_head = true;

    auto& dst_node = nodes_[j];
    if (action != Action::Forward) {
      auto& buf = dst_node.reassembly[k];
      buf.push_back(f.data);
      if (f.tail) {
        result.deliveries.push_back({j, lane_of(k), std::move(buf)});
        buf.clear();
      }
    }
    if (action != Action::Consume) {
      dst_node.fifo[target].push_back(f);
      dst_node.owner[target] = f.tail ? Owner::None : Owner::Through;
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (!result.accepted[j]) continue;
    const auto target = fifo_index(offers[j]->lane, false);
    auto& node = nodes_[j];
    node.fifo[target].push_back(offers[j]->flit);
    node.owner[target] = offers[j]->flit.tail ? Owner::None : Owner::Local;
  }
  ++ticks_;
  return result;
}

}  // namespace tilesim::noc
