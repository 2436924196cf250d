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
#include <stdexcept>

#include "tilesim/debug/packet.hpp"

namespace tilesim::debug {

enum class TriggerCondition : std::uint8_t { None = 0, PcEquals = 1, EventCount = 2, LinkLoad = 3 };
enum class TriggerAction : std::uint8_t { StartCollection = 0, StopCollection = 1 };
enum class TriggerScope : std::uint8_t { Local = 0, Global = 1 };

const char* to_string(TriggerCondition c);
const char* to_string(TriggerAction a);
const char* to_string(TriggerScope s);

/// `arg` is the pc for PcEquals, the count for EventCount and a Q16.16
/// fraction in [0, 1] for LinkLoad. `window` is only used by LinkLoad.
struct TriggerSpec {
  ModuleId module = 0;
  TriggerCondition condition = TriggerCondition::None;
  std::uint32_t arg = 0;
  std::uint16_t window = 256;
  TriggerAction action = TriggerAction::StartCollection;
  TriggerScope scope = TriggerScope::Local;
  friend bool operator==(const TriggerSpec&, const TriggerSpec&) = default;
};

class TypeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint32_t kQ16One = 1u << 16;

/// Rounds to the nearest Q16.16 value; throws std::invalid_argument outside [0, 1].
std::uint32_t fraction_to_q16(double fraction);
inline double q16_to_fraction(std::uint32_t q) { return static_cast<double>(q) / kQ16One; }

bool compatible(TriggerCondition c, ModuleType t);

/// Throws TypeMismatch or std::invalid_argument.
void validate(const TriggerSpec& spec, ModuleType target);

/// count / window > q, computed exactly.
inline bool link_load_above(std::uint32_t count, std::uint32_t window, std::uint32_t q) {
  return static_cast<std::uint64_t>(count) * kQ16One > static_cast<std::uint64_t>(q) * window;
}

}  // namespace tilesim::debug
