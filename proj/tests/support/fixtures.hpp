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
 * @file fixtures.hpp
 * @brief Shared test setup: checked-in data, standard systems, debug runs.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/daemon/driver.hpp"
#include "tilesim/debug/packet.hpp"
#include "tilesim/host/session.hpp"
#include "tilesim/platform/config.hpp"
#include "tilesim/platform/system.hpp"

namespace tilesim::testing {

std::string data_path(const std::string& rel);
std::string read_text(const std::string& path);

/// A mesh configuration straight from map_description.
platform::PlatformConfiguration mesh_config(int width, int height, bool debug = true,
                                            std::uint16_t nocstat_window = 256);

/// Ping on tile 0, pong on tile 1, four round trips.
platform::ProgramSet ping_pong();

struct DebugRun {
  std::vector<debug::ModuleDescriptor> modules;
  std::vector<debug::TraceEvent> arrival;  // as read off the channel
  std::vector<debug::TraceEvent> merged;   // through the online merger
  std::vector<debug::TraceEvent> emitted;  // the simulator's emission log
  std::vector<debug::CollectionChange> collection_log;
  std::vector<debug::BroadcastRecord> broadcast_log;
  daemon::SessionReport report;
  nlohmann::json stats;
};

/// Runs a system behind an in-process loopback channel. `configure` gets
/// the session after enumeration and before RUN.
DebugRun run_with_session(platform::SystemInstance sys, std::uint64_t max_cycles,
                          const std::function<void(host::Session&)>& configure);

}  // namespace tilesim::testing
