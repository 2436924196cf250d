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
#include <optional>

namespace tilesim::debug {

struct ItraceRecord {
  std::uint32_t start_pc = 0;
  std::uint32_t run_length = 1;
  friend bool operator==(const ItraceRecord&, const ItraceRecord&) = default;
};

/// Run-length compression of retired pcs: a run continues while each pc is
/// its predecessor plus 4. Runs are cut at kMaxRun so the length fits in one
/// 16-bit payload word.
class ItraceCompressor {
 public:
  static constexpr std::uint32_t kMaxRun = 0xFFFF;

  std::optional<ItraceRecord> feed(std::uint32_t pc) {
    if (pending_ && pc == last_pc_ + 4 && pending_->run_length < kMaxRun) {
      ++pending_->run_length;
      last_pc_ = pc;
      return std::nullopt;
    }
    auto out = pending_;
    pending_ = ItraceRecord{pc, 1};
    last_pc_ = pc;
    return out;
  }

  std::optional<ItraceRecord> flush() {
    auto out = pending_;
    pending_.reset();
    return out;
  }

  bool has_pending() const { return pending_.has_value(); }

  friend bool operator==(const ItraceCompressor&, const ItraceCompressor&) = default;

 private:
  std::optional<ItraceRecord> pending_;
  std::uint32_t last_pc_ = 0;
};

}  // namespace tilesim::debug
