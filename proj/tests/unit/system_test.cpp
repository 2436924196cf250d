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

#include "fixtures.hpp"
#include "tilesim/debug/registers.hpp"
#include "tilesim/platform/system.hpp"

using namespace tilesim;
using tilesim::testing::mesh_config;

namespace {

void collect_everything(platform::SystemInstance& sys) {
  auto* f = sys.fabric();
  ASSERT_NE(f, nullptr);
  for (std::size_t id = 1; id < f->module_count(); ++id) {
    f->write_register(static_cast<debug::ModuleId>(id), debug::reg::kEnable, 1, sys.cycle());
  }
}

}  // namespace

TEST(System, PingPong) {
  const auto programs = tilesim::testing::ping_pong();
  auto sys = platform::map_configuration(mesh_config(2, 2), programs);
  sys.run(5000);
  ASSERT_TRUE(sys.all_halted());
  const auto result = programs.at(0).symbols.at("result");
  EXPECT_EQ(sys.memory(0)[result / 4], 4u);
  const auto stats = sys.stats();
  EXPECT_EQ(stats["tiles"][0]["messages_sent"], 4);
  EXPECT_EQ(stats["tiles"][1]["messages_received"], 4);
  EXPECT_EQ(stats["network"]["flits_injected"], stats["network"]["flits_ejected"]);
}

TEST(System, TilesWithoutProgramHalt) {
  auto sys = platform::map_configuration(mesh_config(2, 1), {});
  EXPECT_EQ(sys.run(100), 1u);
  EXPECT_TRUE(sys.all_halted());
}

TEST(System, DeterministicUnderSeed) {
  auto make = [](std::uint64_t seed) {
    auto sys = platform::map_configuration(mesh_config(3, 3), tilesim::testing::ping_pong(),
                                           {.seed = seed, .traffic_rate = 0.05});
    sys.run(3000);
    return sys.stats();
  };
  EXPECT_EQ(make(7), make(7));
  EXPECT_NE(make(7), make(8));
  EXPECT_GT(make(7)["tiles"][4]["synthetic_received"].get<int>(), 0);
}

TEST(System, DebugDoesNotPerturbFunctionalState) {
  for (const std::uint64_t seed : {1u, 2u}) {
    auto plain = platform::map_configuration(mesh_config(3, 2, false), tilesim::testing::ping_pong(),
                                             {.seed = seed, .traffic_rate = 0.1});
    auto traced = platform::map_configuration(mesh_config(3, 2, true, 16), tilesim::testing::ping_pong(),
                                              {.seed = seed, .traffic_rate = 0.1});
    collect_everything(traced);
    for (int c = 0; c < 2000; ++c) {
      plain.tick();
      traced.tick();
      ASSERT_TRUE(plain.functional_equal(traced)) << "cycle " << c;
    }
    EXPECT_FALSE(traced.fabric()->emission_log().empty());
  }
}

TEST(System, FaultIsReported) {
  platform::ProgramSet p{{0, pe::assemble(".text\n LI r1, 2\n LW r2, 0(r1)\n HALT\n")}};
  auto sys = platform::map_configuration(mesh_config(1, 1), p);
  sys.run(100);
  EXPECT_TRUE(sys.all_halted());
  EXPECT_FALSE(sys.stats()["tiles"][0]["fault"].is_null());
}
