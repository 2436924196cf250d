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

#include "tilesim/debug/trigger.hpp"

#include <cmath>
#include <string>

namespace tilesim::debug {

const char* to_string(TriggerCondition c) {
  switch (c) {
    case TriggerCondition::None: return "None";
    case TriggerCondition::PcEquals: return "PcEquals";
    case TriggerCondition::EventCount: return "EventCountReaches";
    case TriggerCondition::LinkLoad: return "LinkLoadAbove";
  }
  return "?";
}

const char* to_string(TriggerAction a) {
  return a == TriggerAction::StartCollection ? "StartCollection" : "StopCollection";
}

const char* to_string(TriggerScope s) { return s == TriggerScope::Local ? "Local" : "Global"; }

std::uint32_t fraction_to_q16(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("load fraction must lie in [0, 1]");
  }
  return static_cast<std::uint32_t>(std::lround(fraction * kQ16One));
}

bool compatible(TriggerCondition c, ModuleType t) {
  switch (c) {
    case TriggerCondition::None: return t != ModuleType::ExtIf;
    case TriggerCondition::PcEquals: return t == ModuleType::CoreTrace;
    case TriggerCondition::EventCount: return t != ModuleType::ExtIf;
    case TriggerCondition::LinkLoad: return t == ModuleType::NocStat;
  }
  return false;
}

void validate(const TriggerSpec& spec, ModuleType target) {
  if (!compatible(spec.condition, target)) {
    throw TypeMismatch(std::string(to_string(spec.condition)) + " is not available on a " +
                       to_string(target) + " module");
  }
  switch (spec.condition) {
    case TriggerCondition::PcEquals:
      if (spec.arg % 4 != 0) throw std::invalid_argument("PcEquals address must be word aligned");
      break;
    case TriggerCondition::EventCount:
      if (spec.arg == 0) throw std::invalid_argument("EventCountReaches needs n >= 1");
      break;
    case TriggerCondition::LinkLoad:
      if (spec.arg > kQ16One) throw std::invalid_argument("load fraction above 1");
      if (spec.window == 0) throw std::invalid_argument("LinkLoadAbove window must be positive");
      break;
    case TriggerCondition::None:
      break;
  }
}

}  // namespace tilesim::debug
