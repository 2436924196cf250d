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

#include "tilesim/host/trigger_json.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace tilesim::host {

using nlohmann::json;

namespace {

std::uint64_t unsigned_field(const json& j, const char* key, std::uint64_t max) {
  if (!j.contains(key)) throw TriggerFormatError(std::string("missing \"") + key + "\"");
  const auto& v = j.at(key);
  std::uint64_t out = 0;
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    out = v.get<std::uint64_t>();
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    try {
      out = std::stoull(s, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw TriggerFormatError(std::string("\"") + key + "\" is not a number");
  } else {
    throw TriggerFormatError(std::string("\"") + key + "\" must be a non-negative integer");
  }
  if (out > max) throw TriggerFormatError(std::string("\"") + key + "\" out of range");
  return out;
}

std::string string_field(const json& j, const char* key, const char* fallback = nullptr) {
  if (!j.contains(key)) {
    if (fallback) return fallback;
    throw TriggerFormatError(std::string("missing \"") + key + "\"");
  }
  if (!j.at(key).is_string()) throw TriggerFormatError(std::string("\"") + key + "\" must be a string");
  return j.at(key).get<std::string>();
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%x", v);
  return buf;
}

}  // namespace

debug::TriggerSpec parse_trigger(const json& j) {
  using namespace debug;
  if (!j.is_object()) throw TriggerFormatError("trigger must be a JSON object");
  TriggerSpec t;
  t.module = static_cast<ModuleId>(unsigned_field(j, "module", 0xFE));

  const auto cond = string_field(j, "condition");
  if (cond == "PcEquals") {
    t.condition = TriggerCondition::PcEquals;
    t.arg = static_cast<std::uint32_t>(unsigned_field(j, "addr", 0xFFFF'FFFFu));
  } else if (cond == "EventCountReaches") {
    t.condition = TriggerCondition::EventCount;
    t.arg = static_cast<std::uint32_t>(unsigned_field(j, "count", 0xFFFF'FFFFu));
  } else if (cond == "LinkLoadAbove") {
    t.condition = TriggerCondition::LinkLoad;
    if (!j.contains("fraction") || !j.at("fraction").is_number()) {
      throw TriggerFormatError("\"fraction\" must be a number");
    }
    try {
      t.arg = fraction_to_q16(j.at("fraction").get<double>());
    } catch (const std::invalid_argument& e) {
      throw TriggerFormatError(e.what());
    }
    t.window = j.contains("window") ? static_cast<std::uint16_t>(unsigned_field(j, "window", 0xFFFF)) : 256;
  } else {
    throw TriggerFormatError("unknown condition \"" + cond + "\"");
  }

  const auto action = string_field(j, "action");
  if (action == "StartCollection") t.action = TriggerAction::StartCollection;
  else if (action == "StopCollection") t.action = TriggerAction::StopCollection;
  else throw TriggerFormatError("unknown action \"" + action + "\"");

  const auto scope = string_field(j, "scope", "Local");
  if (scope == "Local") t.scope = TriggerScope::Local;
  else if (scope == "Global") t.scope = TriggerScope::Global;
  else throw TriggerFormatError("unknown scope \"" + scope + "\"");

  for (const auto& [k, _] : j.items()) {
    static const std::set<std::string> known{"module", "condition", "addr", "count", "fraction", "window", "action", "scope"};
    if (!known.count(k)) throw TriggerFormatError("unknown field \"" + k + "\"");
  }
  return t;
}

json to_json(const debug::TriggerSpec& t) {
  using namespace debug;
  json j = {{"module", t.module}, {"action", to_string(t.action)}, {"scope", to_string(t.scope)}};
  switch (t.condition) {
    case TriggerCondition::PcEquals:
      j["condition"] = "PcEquals";
      j["addr"] = hex(t.arg);
      break;
    case TriggerCondition::EventCount:
      j["condition"] = "EventCountReaches";
      j["count"] = t.arg;
      break;
    case TriggerCondition::LinkLoad:
      j["condition"] = "LinkLoadAbove";
      j["fraction"] = q16_to_fraction(t.arg);
      j["window"] = t.window;
      break;
    case TriggerCondition::None:
      j["condition"] = "None";
      break;
  }
  return j;
}

TriggerFile parse_trigger_file(const json& j) {
  if (!j.is_object()) throw TriggerFormatError("trigger file must be a JSON object");
  TriggerFile f;
  for (const auto& [k, _] : j.items()) {
    if (k != "triggers" && k != "start") throw TriggerFormatError("unknown field \"" + k + "\"");
  }
  if (j.contains("triggers")) {
    if (!j.at("triggers").is_array()) throw TriggerFormatError("\"triggers\" must be an array");
    for (const auto& t : j.at("triggers")) f.triggers.push_back(parse_trigger(t));
  }
  if (j.contains("start")) {
    const auto& s = j.at("start");
    if (s.is_string() && s.get<std::string>() == "all") {
      f.start = TriggerFile::Start::All;
    } else if (s.is_array()) {
      f.start = TriggerFile::Start::Listed;
      for (const auto& id : s) {
        if (!id.is_number_unsigned() || id.get<std::uint64_t>() > 0xFE) {
          throw TriggerFormatError("\"start\" entries must be module ids");
        }
        f.listed.push_back(static_cast<debug::ModuleId>(id.get<std::uint64_t>()));
      }
    } else {
      throw TriggerFormatError("\"start\" must be \"all\" or a list of module ids");
    }
  }
  return f;
}

std::vector<debug::ModuleId> start_set(const TriggerFile& f, const std::vector<debug::ModuleDescriptor>& modules) {
  std::vector<debug::ModuleId> trace_modules;
  for (const auto& m : modules) {
    if (m.type != debug::ModuleType::ExtIf) trace_modules.push_back(m.id);
  }
  if (f.start == TriggerFile::Start::All) return trace_modules;
  if (f.start == TriggerFile::Start::Listed) return f.listed;
  std::vector<debug::ModuleId> out;
  for (const auto id : trace_modules) {
    const bool gated = std::any_of(f.triggers.begin(), f.triggers.end(), [&](const debug::TriggerSpec& t) {
      return t.module == id && t.action == debug::TriggerAction::StartCollection;
    });
    if (!gated) out.push_back(id);
  }
  return out;
}

}  // namespace tilesim::host
