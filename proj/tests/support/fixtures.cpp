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

#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tilesim/host/merge.hpp"
#include "tilesim/pe/assembler.hpp"

namespace tilesim::testing {

std::string data_path(const std::string& rel) { return std::string(TILESIM_TEST_DATA) + "/" + rel; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

platform::PlatformConfiguration mesh_config(int width, int height, bool debug, std::uint16_t nocstat_window) {
  platform::PlatformDescription d;
  d.width = width;
  d.height = height;
  d.debug_enabled = debug;
  d.nocstat_window = nocstat_window;
  return platform::map_description(d);
}

platform::ProgramSet ping_pong() {
  return {{0, pe::assemble(read_text(data_path("programs/ping.s")))},
          {1, pe::assemble(read_text(data_path("programs/pong.s")))}};
}

DebugRun run_with_session(platform::SystemInstance sys, std::uint64_t max_cycles,
                          const std::function<void(host::Session&)>& configure) {
  DebugRun out;
  daemon::LocalSimulation sim(std::move(sys), max_cycles);
  {
    auto session = host::Session::open(sim.host_channel());
    out.modules = session->enumerate();
    if (configure) configure(*session);
    session->run();
    std::vector<debug::ModuleId> ids;
    for (const auto& m : out.modules) ids.push_back(m.id);
    host::StreamMerger merger(ids);
    while (auto item = session->next_item(std::chrono::seconds(60))) {
      if (item->event) {
        out.arrival.push_back(*item->event);
        merger.push(*item->event);
      } else {
        merger.watermark(item->mark);
      }
      for (auto& e : merger.take_ready()) out.merged.push_back(std::move(e));
    }
    for (auto& e : merger.finish()) out.merged.push_back(std::move(e));
  }
  out.report = sim.join();
  const auto* fabric = sim.system().fabric();
  out.emitted = fabric->emission_log();
  out.collection_log = fabric->collection_log();
  out.broadcast_log = fabric->broadcast_log();
  out.stats = sim.system().stats();
  return out;
}

}  // namespace tilesim::testing
