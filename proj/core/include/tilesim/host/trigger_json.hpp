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
 * @file trigger_json.hpp
 * @brief JSON form of trigger specifications, shared by the trigger file of
 * `tilesim attach` and POST /api/triggers.
 *
 *   {"module": 1, "condition": "PcEquals", "addr": "0x40",
 *    "action": "StartCollection", "scope": "Local"}
 *
 * EventCountReaches takes "count"; LinkLoadAbove takes "fraction" (0..1)
 * and an optional "window" (default 256).
 */
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/debug/trigger.hpp"

namespace tilesim::host {

class TriggerFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

debug::TriggerSpec parse_trigger(const nlohmann::json& j);
nlohmann::json to_json(const debug::TriggerSpec& t);

struct TriggerFile {
  /// Which modules collect from cycle 0. Default: every trace module except
  /// those with a StartCollection trigger.
  enum class Start : std::uint8_t { Default, All, Listed };

  std::vector<debug::TriggerSpec> triggers;
  Start start = Start::Default;
  std::vector<debug::ModuleId> listed;
};

TriggerFile parse_trigger_file(const nlohmann::json& j);

/// The modules a trigger file starts, given the module list.
std::vector<debug::ModuleId> start_set(const TriggerFile& f, const std::vector<debug::ModuleDescriptor>& modules);

}  // namespace tilesim::host
