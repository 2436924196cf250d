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
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <vector>

#include "tilesim/debug/packet.hpp"

namespace tilesim::host {

class NonMonotoneInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Orders events by (timestamp, module id); equal keys keep input order.
inline bool merge_before(const debug::TraceEvent& a, const debug::TraceEvent& b) {
  return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.module < b.module;
}

/// k-way merge of timestamp-monotone lists. Throws NonMonotoneInput.
std::vector<debug::TraceEvent> merge_streams(const std::vector<std::vector<debug::TraceEvent>>& streams);

/// Online version of merge_streams for events arriving interleaved on one
/// channel. An event is released once nothing that could still arrive may
/// precede it: every other module has been seen past it, or a watermark
/// from the external interface covers its timestamp. The concatenation of
/// everything released, finish() included, equals merge_streams over the
/// per-module inputs.
class StreamMerger {
 public:
  /// `modules` lists every module that may emit events.
  explicit StreamMerger(const std::vector<debug::ModuleId>& modules);

  void push(const debug::TraceEvent& e);
  /// Every event stamped below `mark` has been delivered.
  void watermark(std::uint32_t mark);
  std::vector<debug::TraceEvent> take_ready();
  std::vector<debug::TraceEvent> finish();

 private:
  struct Lane {
    std::deque<debug::TraceEvent> queue;
    std::uint32_t last = 0;
  };
  bool safe(const debug::TraceEvent& e) const;

  std::map<debug::ModuleId, Lane> lanes_;
  std::uint32_t floor_ = 0;
};

}  // namespace tilesim::host
