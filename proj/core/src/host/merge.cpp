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

#include "tilesim/host/merge.hpp"

#include <queue>
#include <string>

namespace tilesim::host {

std::vector<debug::TraceEvent> merge_streams(const std::vector<std::vector<debug::TraceEvent>>& streams) {
  std::size_t total = 0;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const auto& v = streams[s];
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].timestamp < v[i - 1].timestamp) {
        throw NonMonotoneInput("stream " + std::to_string(s) + " goes back in time at index " + std::to_string(i));
      }
    }
    total += v.size();
  }

  struct Head {
    std::size_t stream, index;
  };
  // Ties on (timestamp, module) fall back to stream order, keeping the merge stable.
  auto later = [&](const Head& a, const Head& b) {
    const auto& ea = streams[a.stream][a.index];
    const auto& eb = streams[b.stream][b.index];
    if (merge_before(ea, eb)) return false;
    if (merge_before(eb, ea)) return true;
    return a.stream > b.stream;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  for (std::size_t s = 0; s < streams.size(); ++s) {
    if (!streams[s].empty()) heap.push({s, 0});
  }
  std::vector<debug::TraceEvent> out;
  out.reserve(total);
  while (!heap.empty()) {
    const auto h = heap.top();
    heap.pop();
    out.push_back(streams[h.stream][h.index]);
    if (h.index + 1 < streams[h.stream].size()) heap.push({h.stream, h.index + 1});
  }
  return out;
}

StreamMerger::StreamMerger(const std::vector<debug::ModuleId>& modules) {
  for (const auto id : modules) lanes_[id];
}

void StreamMerger::push(const debug::TraceEvent& e) {
  const auto it = lanes_.find(e.module);
  if (it == lanes_.end()) throw std::invalid_argument("event from unknown module " + std::to_string(e.module));
  auto& lane = it->second;
  if (e.timestamp < lane.last) {
    throw NonMonotoneInput("module " + std::to_string(e.module) + " went back in time");
  }
  if (e.timestamp < floor_) throw NonMonotoneInput("event arrived below the watermark");
  lane.last = e.timestamp;
  lane.queue.push_back(e);
}

void StreamMerger::watermark(std::uint32_t mark) {
  if (mark > floor_) floor_ = mark;
}

bool StreamMerger::safe(const debug::TraceEvent& e) const {
  if (e.timestamp < floor_) return true;
  for (const auto& [id, lane] : lanes_) {
    if (id == e.module || !lane.queue.empty()) continue;
    // Future events from `id` are stamped at least lane.last.
    if (id < e.module ? lane.last <= e.timestamp : lane.last < e.timestamp) return false;
  }
  return true;
}

std::vector<debug::TraceEvent> StreamMerger::take_ready() {
  std::vector<debug::TraceEvent> out;
  for (;;) {
    Lane* best = nullptr;
    for (auto& [id, lane] : lanes_) {
      if (!lane.queue.empty() && (!best || merge_before(lane.queue.front(), best->queue.front()))) best = &lane;
    }
    if (!best || !safe(best->queue.front())) break;
    out.push_back(std::move(best->queue.front()));
    best->queue.pop_front();
  }
  return out;
}

std::vector<debug::TraceEvent> StreamMerger::finish() {
  floor_ = 0xFFFF'FFFFu;
  auto out = take_ready();
  for (auto& [id, lane] : lanes_) {
    // Events stamped exactly 0xFFFFFFFF remain; release them in key order.
    while (!lane.queue.empty()) {
      out.push_back(std::move(lane.queue.front()));
      lane.queue.pop_front();
    }
  }
  return out;
}

}  // namespace tilesim::host
