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
#include <map>
#include <thread>

#include "fixtures.hpp"
#include "tilesim/daemon/driver.hpp"
#include "tilesim/debug/registers.hpp"
#include "tilesim/host/merge.hpp"
#include "tilesim/host/session.hpp"

using namespace tilesim;
using debug::TraceEvent;
using tilesim::testing::mesh_config;

namespace {

platform::SystemInstance ping_pong_system(int w = 2, int h = 2) {
  return platform::map_configuration(mesh_config(w, h, true, 64), tilesim::testing::ping_pong());
}

std::vector<std::vector<TraceEvent>> per_module(const std::vector<TraceEvent>& events) {
  std::map<debug::ModuleId, std::vector<TraceEvent>> by;
  for (const auto& e : events) by[e.module].push_back(e);
  std::vector<std::vector<TraceEvent>> out;
  for (auto& [id, v] : by) out.push_back(std::move(v));
  return out;
}

std::vector<TraceEvent> sorted(std::vector<TraceEvent> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// The same run over TCP: simulator on a thread, host through connect_tcp.
std::vector<TraceEvent> run_over_tcp(platform::SystemInstance sys, std::uint64_t cycles) {
  daemon::TcpListener listener("127.0.0.1", 0);
  std::thread sim([&] {
    auto ch = listener.accept(std::chrono::seconds(10));
    daemon::run_debug_session(sys, *ch, cycles);
  });
  auto session = host::Session::connect_tcp("127.0.0.1", listener.port(), {});
  const auto modules = session->enumerate();
  session->start_collection_all();
  session->run();
  std::vector<debug::ModuleId> ids;
  for (const auto& m : modules) ids.push_back(m.id);
  host::StreamMerger merger(ids);
  std::vector<TraceEvent> merged;
  while (auto item = session->next_item(std::chrono::seconds(60))) {
    if (item->event) {
      merger.push(*item->event);
    } else {
      merger.watermark(item->mark);
    }
    for (auto& e : merger.take_ready()) merged.push_back(e);
  }
  for (auto& e : merger.finish()) merged.push_back(e);
  sim.join();
  return merged;
}

}  // namespace

TEST(Session, EnumerateIsStableAndSorted) {
  daemon::LocalSimulation sim(ping_pong_system(), 100);
  auto s = host::Session::open(sim.host_channel());
  const auto first = s->enumerate();
  ASSERT_EQ(first.size(), 9u);
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].id, i);
  EXPECT_EQ(first[0].type, debug::ModuleType::ExtIf);
  EXPECT_EQ(first[0].attach, 9);
  EXPECT_EQ(s->enumerate(), first);
  EXPECT_EQ(s->read_register(5, debug::reg::kType), static_cast<std::uint16_t>(debug::ModuleType::NocStat));
  s->run();
  while (s->next_event(std::chrono::seconds(30))) {
  }
  EXPECT_TRUE(s->ended());
  EXPECT_TRUE(sim.join().ran);
}

TEST(Session, HostSeesExactlyWhatWasEmitted) {
  const auto run = tilesim::testing::run_with_session(ping_pong_system(), 5000,
                                             [](host::Session& s) { s.start_collection_all(); });
  ASSERT_FALSE(run.emitted.empty());
  EXPECT_EQ(sorted(run.arrival), sorted(run.emitted));
  EXPECT_EQ(run.merged, host::merge_streams(per_module(run.arrival)));
  EXPECT_TRUE(std::is_sorted(run.merged.begin(), run.merged.end(), host::merge_before));
  EXPECT_TRUE(run.report.ran);
}

TEST(Session, TcpMatchesLoopback) {
  const auto loop = tilesim::testing::run_with_session(ping_pong_system(), 5000,
                                              [](host::Session& s) { s.start_collection_all(); });
  EXPECT_EQ(run_over_tcp(ping_pong_system(), 5000), loop.merged);
}

TEST(Session, ConnectionRefused) {
  std::uint16_t port = 0;
  {
    daemon::TcpListener l("127.0.0.1", 0);
    port = l.port();
  }
  EXPECT_THROW(host::Session::connect_tcp("127.0.0.1", port, {}, std::chrono::milliseconds(500)),
               daemon::ConnectionRefused);
}

TEST(Session, TriggerErrors) {
  tilesim::testing::run_with_session(ping_pong_system(), 10, [](host::Session& s) {
    debug::TriggerSpec load{1, debug::TriggerCondition::LinkLoad, debug::kQ16One / 2, 256,
                            debug::TriggerAction::StartCollection, debug::TriggerScope::Local};
    EXPECT_THROW(s.set_trigger(load), host::TypeMismatch);
    load.module = 42;
    EXPECT_THROW(s.set_trigger(load), host::NoSuchModule);
    load.module = 5;
    load.arg = debug::kQ16One + 1;
    EXPECT_THROW(s.set_trigger(load), std::invalid_argument);
    load.arg = debug::kQ16One / 4;
    EXPECT_NO_THROW(s.set_trigger(load));
    EXPECT_EQ(s.read_register(5, debug::reg::kTrigArm), 1);
    const std::vector<debug::ModuleId> bogus{77};
    EXPECT_THROW(s.start_collection(bogus), host::NoSuchModule);
  });
}

TEST(Session, TriggerGatesCollection) {
  const auto programs = tilesim::testing::ping_pong();
  const auto loop_pc = programs.at(0).symbols.at("loop");
  auto sys = platform::map_configuration(mesh_config(2, 2), programs);
  const auto run = tilesim::testing::run_with_session(std::move(sys), 5000, [&](host::Session& s) {
    s.set_trigger({1, debug::TriggerCondition::PcEquals, loop_pc, 256, debug::TriggerAction::StartCollection,
                   debug::TriggerScope::Local});
  });
  ASSERT_FALSE(run.merged.empty());
  std::uint64_t fired = 0;
  for (const auto& c : run.collection_log) {
    if (c.module == 1 && c.enabled) fired = c.cycle;
  }
  ASSERT_GT(fired, 0u);
  bool saw_trigger = false;
  for (const auto& e : run.merged) {
    EXPECT_EQ(e.module, 1) << "only the triggered module collects";
    EXPECT_GE(e.timestamp, fired);
    if (e.kind == debug::PacketType::Trigger) saw_trigger = true;
  }
  EXPECT_TRUE(saw_trigger);
  const auto& first_trace = *std::find_if(run.merged.begin(), run.merged.end(),
                                          [](const TraceEvent& e) { return e.kind == debug::PacketType::Itrace; });
  EXPECT_EQ((std::uint32_t{first_trace.payload[0]} << 16) | first_trace.payload[1], loop_pc);
}
