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

namespace tilesim::na {

struct Translation {
  enum class Kind : std::uint8_t { Local, Remote, Fault } kind = Kind::Fault;
  std::uint32_t tile = 0;
  std::uint32_t offset = 0;

  friend bool operator==(const Translation&, const Translation&) = default;
};

/// PGAS address translation: the global space is cut into `partition_size`
/// chunks, chunk i belonging to tile i. `partition_size` must be a power of
/// two; addresses at or beyond num_tiles * partition_size fault.
constexpr Translation lsu_translate(std::uint32_t addr, std::uint32_t own_tile,
                                    std::uint32_t partition_size, std::uint32_t num_tiles) {
  const std::uint32_t tile = addr / partition_size;
  const std::uint32_t offset = addr & (partition_size - 1);
  if (tile >= num_tiles) return {Translation::Kind::Fault, 0, 0};
  if (tile == own_tile) return {Translation::Kind::Local, tile, offset};
  return {Translation::Kind::Remote, tile, offset};
}

constexpr bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace tilesim::na
