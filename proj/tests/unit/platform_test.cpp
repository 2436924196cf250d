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
#include "tilesim/platform/config.hpp"
#include "tilesim/platform/system.hpp"

using namespace tilesim;
using nlohmann::json;
using platform::ConfigError;
using platform::ValidationError;
using tilesim::testing::data_path;
using tilesim::testing::read_text;

namespace {

json description(const std::string& name) {
  return json::parse(read_text(data_path("descriptions/" + name + ".json")));
}

std::string failing_path(json j) {
  try {
    platform::parse_description(j);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST(Description, Defaults) {
  const auto d = platform::parse_description(description("mesh_2x2"));
  EXPECT_EQ(d.width, 2);
  EXPECT_EQ(d.vcs, 3);
  EXPECT_EQ(d.org, platform::MemoryOrg::Distributed);
  EXPECT_EQ(platform::parse_description(platform::to_json(d)), d);
}

TEST(Description, ValidationNamesTheField) {
  auto j = description("mesh_2x2");
  j["noc"]["vcs"] = 2;
  EXPECT_EQ(failing_path(j), "noc.vcs");
  j = description("mesh_2x2");
  j["noc"]["flit_width"] = 16;
  EXPECT_EQ(failing_path(j), "noc.flit_width");
  j = description("mesh_2x2");
  j["tile"]["memory_kib"] = 48;
  EXPECT_EQ(failing_path(j), "tile.memory_kib");
  j = description("mesh_2x2");
  j["tile"]["cores"] = 2;
  EXPECT_EQ(failing_path(j), "tile.cores");
  j = description("mesh_2x2");
  j["width"] = 0;
  EXPECT_EQ(failing_path(j), "width");
  j = description("mesh_2x2");
  j["colour"] = "blue";
  EXPECT_EQ(failing_path(j), "colour");
  j = description("mesh_2x2");
  j.erase("height");
  EXPECT_EQ(failing_path(j), "height");
  j = description("mesh_2x2");
  j["pattern"] = "torus";
  EXPECT_EQ(failing_path(j), "pattern");
  j = description("mesh_4x4_pgas");
  j["pgas"]["partition_kib"] = 128;
  EXPECT_EQ(failing_path(j), "pgas.partition_kib");
}

TEST(Generator, MatchesGoldenFiles) {
  for (const std::string name : {"mesh_1x1", "mesh_2x2", "mesh_4x4_pgas"}) {
    const auto cfg = platform::map_description(platform::parse_description(description(name)));
    EXPECT_EQ(platform::canonical_dump(platform::to_json(cfg)),
              read_text(data_path("golden/" + name + ".config.json")))
        << name;
    EXPECT_NO_THROW(platform::check_configuration(cfg));
  }
}

TEST(Generator, PgasLayout) {
  const auto cfg = platform::map_description(platform::parse_description(description("mesh_4x4_pgas")));
  std::size_t globals = 0;
  for (const auto& r : cfg.memory_map) {
    if (r.kind != "global") continue;
    EXPECT_EQ(r.base, r.tile * 65536u);
    EXPECT_EQ(r.size, 65536u);
    ++globals;
  }
  EXPECT_EQ(globals, 16u);
  EXPECT_EQ(cfg.debug_modules.size(), 33u);
}

TEST(Configuration, JsonRoundTrip) {
  const auto cfg = tilesim::testing::mesh_config(3, 2);
  EXPECT_EQ(platform::parse_configuration(platform::to_json(cfg)), cfg);
}

TEST(Configuration, HandWrittenFileLoads) {
  const auto cfg =
      platform::parse_configuration(json::parse(read_text(data_path("configs/hand_2x1.config.json"))));
  EXPECT_NO_THROW(platform::check_configuration(cfg));
  auto sys = platform::map_configuration(cfg, {});
  EXPECT_EQ(sys.memory(0).size(), 32768u / 4);
  EXPECT_EQ(sys.memory(1).size(), 131072u / 4);

  const auto run = tilesim::testing::run_with_session(std::move(sys), 10, [](host::Session&) {});
  EXPECT_EQ(run.modules, cfg.debug_modules);
}

TEST(Configuration, Inconsistencies) {
  const auto base = platform::to_json(tilesim::testing::mesh_config(2, 2));
  auto expect_bad = [](json j, const char* what) {
    const auto cfg = platform::parse_configuration(j);
    EXPECT_THROW(platform::check_configuration(cfg), ConfigError) << what;
  };

  auto j = base;
  j["routers"][0]["ports"]["east"] = 3;
  expect_bad(j, "wrong neighbour");
  j = base;
  j["tiles"][1]["x"] = 0;
  expect_bad(j, "tile misplaced");
  j = base;
  j["network_adapters"].erase(1);
  expect_bad(j, "missing adapter");
  j = base;
  j["debug"]["modules"].erase(2);
  expect_bad(j, "module list short");
  j = base;
  j["memory_map"][0]["size"] = 4096;
  expect_bad(j, "local region too small");
  j = base;
  j["tiles"][2]["memory_bytes"] = 5000;
  expect_bad(j, "odd memory size");

  j = base;
  j["tiles"][0].erase("router");
  EXPECT_THROW(platform::parse_configuration(j), ConfigError);
  j = base;
  j["debug"]["modules"][0]["type"] = "LOGIC_ANALYSER";
  EXPECT_THROW(platform::parse_configuration(j), ConfigError);
}

TEST(Configuration, DebugDisabledHasNoModules) {
  const auto cfg = tilesim::testing::mesh_config(2, 2, false);
  EXPECT_TRUE(cfg.debug_modules.empty());
  auto sys = platform::map_configuration(cfg, {});
  EXPECT_EQ(sys.fabric(), nullptr);
}
