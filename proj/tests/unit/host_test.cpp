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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "tilesim/debug/fabric.hpp"
#include "tilesim/host/merge.hpp"
#include "tilesim/host/trigger_json.hpp"

using namespace tilesim;
using debug::TraceEvent;
using nlohmann::json;

namespace {

TraceEvent ev(debug::ModuleId m, std::uint32_t ts, std::uint16_t tag = 0) {
  return {m, ts, debug::PacketType::Itrace, {0, 0, tag}};
}

std::vector<std::vector<TraceEvent>> random_streams(std::mt19937_64& rng, std::size_t k) {
  std::vector<std::vector<TraceEvent>> s(k);
  for (std::size_t m = 0; m < k; ++m) {
    std::uint32_t ts = static_cast<std::uint32_t>(rng() % 5);
    const auto n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) {
      ts += static_cast<std::uint32_t>(rng() % 4);  // repeats allowed
      s[m].push_back(ev(static_cast<debug::ModuleId>(m), ts, static_cast<std::uint16_t>(i)));
    }
  }
  return s;
}

}  // namespace

TEST(Merge, Examples) {
  EXPECT_EQ(host::merge_streams({{ev(1, 5)}, {ev(2, 3)}}), (std::vector<TraceEvent>{ev(2, 3), ev(1, 5)}));
  EXPECT_EQ(host::merge_streams({{ev(2, 7)}, {ev(1, 7)}}), (std::vector<TraceEvent>{ev(1, 7), ev(2, 7)}));
  EXPECT_THROW(host::merge_streams({{ev(1, 5), ev(1, 4)}}), host::NonMonotoneInput);
  EXPECT_TRUE(host::merge_streams({}).empty());
}

TEST(Merge, EqualsStableSortOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const auto streams = random_streams(rng, 1 + rng() % 9);
    std::vector<TraceEvent> all;
    for (const auto& s : streams) all.insert(all.end(), s.begin(), s.end());
    std::stable_sort(all.begin(), all.end(), host::merge_before);
    EXPECT_EQ(host::merge_streams(streams), all);
  }
}

TEST(Merge, OnlineMergerEqualsOffline) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto k = 1 + rng() % 9;
    const auto streams = random_streams(rng, k);
    std::vector<debug::ModuleId> ids;
    for (std::size_t m = 0; m < k; ++m) ids.push_back(static_cast<debug::ModuleId>(m));

    // Random interleaving that keeps each stream's order, with watermarks
    // that are honest: below the smallest pending timestamp.
    host::StreamMerger merger(ids);
    std::vector<std::size_t> pos(k, 0);
    std::vector<TraceEvent> released;
    for (;;) {
      std::vector<std::size_t> live;
      for (std::size_t m = 0; m < k; ++m) {
        if (pos[m] < streams[m].size()) live.push_back(m);
      }
      if (live.empty()) break;
      const auto m = live[rng() % live.size()];
      merger.push(streams[m][pos[m]++]);
      if (rng() % 5 == 0) {
        std::uint32_t floor = 0xFFFFFFFFu;
        for (std::size_t j = 0; j < k; ++j) {
          if (pos[j] < streams[j].size()) floor = std::min(floor, streams[j][pos[j]].timestamp);
        }
        merger.watermark(floor);
      }
      for (auto& e : merger.take_ready()) released.push_back(e);
      // Released output is always a prefix of the offline merge.
    }
    for (auto& e : merger.finish()) released.push_back(e);
    EXPECT_EQ(released, host::merge_streams(streams)) << trial;
  }
}

TEST(Merge, OnlineRejectsUnknownAndNonMonotone) {
  host::StreamMerger m({1, 2});
  EXPECT_THROW(m.push(ev(3, 0)), std::invalid_argument);
  m.push(ev(1, 10));
  EXPECT_THROW(m.push(ev(1, 9)), host::NonMonotoneInput);
}

TEST(Merge, OnlineReleasesWhenEveryLaneIsPast) {
  host::StreamMerger m({1, 2});
  m.push(ev(1, 5));
  EXPECT_TRUE(m.take_ready().empty());
  m.push(ev(2, 6));
  EXPECT_EQ(m.take_ready(), (std::vector<TraceEvent>{ev(1, 5)}));
  m.watermark(7);
  EXPECT_EQ(m.take_ready(), (std::vector<TraceEvent>{ev(2, 6)}));
}

TEST(TriggerJson, ParsesEachCondition) {
  const auto pc = host::parse_trigger(json::parse(
      R"({"module": 1, "condition": "PcEquals", "addr": "0x40", "action": "StartCollection"})"));
  EXPECT_EQ(pc.module, 1);
  EXPECT_EQ(pc.condition, debug::TriggerCondition::PcEquals);
  EXPECT_EQ(pc.arg, 0x40u);
  EXPECT_EQ(pc.scope, debug::TriggerScope::Local);

  const auto cnt = host::parse_trigger(json::parse(
      R"({"module": 6, "condition": "EventCountReaches", "count": 100, "action": "StopCollection", "scope": "Global"})"));
  EXPECT_EQ(cnt.condition, debug::TriggerCondition::EventCount);
  EXPECT_EQ(cnt.arg, 100u);
  EXPECT_EQ(cnt.scope, debug::TriggerScope::Global);

  const auto ll = host::parse_trigger(json::parse(
      R"({"module": 6, "condition": "LinkLoadAbove", "fraction": 0.5, "window": 128, "action": "StartCollection"})"));
  EXPECT_EQ(ll.arg, debug::kQ16One / 2);
  EXPECT_EQ(ll.window, 128);

  EXPECT_EQ(host::parse_trigger(host::to_json(ll)), ll);
  EXPECT_EQ(host::parse_trigger(host::to_json(pc)), pc);
}

TEST(TriggerJson, Rejects) {
  const char* bad[] = {
      R"([])",
      R"({"module": 1, "condition": "PcEquals", "addr": 64})",
      R"({"module": 1, "condition": "Bogus", "addr": 64, "action": "StartCollection"})",
      R"({"module": 1, "condition": "PcEquals", "action": "StartCollection"})",
      R"({"module": 1, "condition": "LinkLoadAbove", "fraction": 1.5, "action": "StartCollection"})",
      R"({"module": 1, "condition": "PcEquals", "addr": 64, "action": "StartCollection", "extra": 1})",
      R"({"module": 300, "condition": "PcEquals", "addr": 64, "action": "StartCollection"})",
      R"({"module": 1, "condition": "PcEquals", "addr": "0xZZ", "action": "StartCollection"})",
  };
  for (const auto* b : bad) EXPECT_THROW(host::parse_trigger(json::parse(b)), host::TriggerFormatError) << b;
}

TEST(TriggerJson, CompatibilityRule) {
  debug::TriggerSpec s{1, debug::TriggerCondition::LinkLoad, debug::kQ16One / 2, 256,
                       debug::TriggerAction::StartCollection, debug::TriggerScope::Local};
  EXPECT_THROW(debug::validate(s, debug::ModuleType::CoreTrace), debug::TypeMismatch);
  EXPECT_NO_THROW(debug::validate(s, debug::ModuleType::NocStat));
  s.condition = debug::TriggerCondition::PcEquals;
  s.arg = 0x40;
  EXPECT_THROW(debug::validate(s, debug::ModuleType::NocStat), debug::TypeMismatch);
  EXPECT_THROW(debug::validate(s, debug::ModuleType::ExtIf), debug::TypeMismatch);
}

TEST(TriggerJson, StartSet) {
  const auto modules = debug::module_layout(2, 2);
  const auto def = host::parse_trigger_file(json::parse(
      R"({"triggers": [{"module": 2, "condition": "PcEquals", "addr": 16, "action": "StartCollection"}]})"));
  EXPECT_EQ(host::start_set(def, modules), (std::vector<debug::ModuleId>{1, 3, 4, 5, 6, 7, 8}));
  const auto all = host::parse_trigger_file(json::parse(R"({"triggers": [], "start": "all"})"));
  EXPECT_EQ(host::start_set(all, modules).size(), 8u);
  const auto listed = host::parse_trigger_file(json::parse(R"({"triggers": [], "start": [3, 1]})"));
  EXPECT_EQ(host::start_set(listed, modules), (std::vector<debug::ModuleId>{3, 1}));
  EXPECT_THROW(host::parse_trigger_file(json::parse(R"({"start": "some"})")), host::TriggerFormatError);
}
