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
 * @file system.hpp
 * @brief A runnable system instantiated from a platform configuration.
 *
 * One cycle, in order:
 *   1. synthetic background traffic is queued (when enabled)
 *   2. each adapter offers one flit; the mesh ticks; ejected flits go to the adapters
 *   3. every core steps once (an MMIO send issued now injects from the next cycle)
 *   4. the debug fabric observes the cycle and its ring ticks once
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tilesim/debug/fabric.hpp"
#include "tilesim/na/adapter.hpp"
#include "tilesim/noc/mesh.hpp"
#include "tilesim/pe/assembler.hpp"
#include "tilesim/pe/core.hpp"
#include "tilesim/platform/config.hpp"

namespace tilesim::platform {

struct SystemOptions {
  std::uint64_t seed = 0;
  double traffic_rate = 0.0;  // synthetic MSG packets per tile per cycle
};

using ProgramSet = std::map<std::uint32_t, pe::ProgramImage>;

class SystemInstance {
 public:
  SystemInstance(PlatformConfiguration config, const ProgramSet& programs, SystemOptions options = {});

  SystemInstance(const SystemInstance&) = delete;
  SystemInstance& operator=(const SystemInstance&) = delete;
  SystemInstance(SystemInstance&&) = default;
  SystemInstance& operator=(SystemInstance&&) = default;

  const PlatformConfiguration& configuration() const { return config_; }
  std::size_t num_tiles() const { return tiles_.size(); }
  std::uint64_t cycle() const { return cycle_; }

  void tick();
  /// Runs until `max_cycles` more cycles have elapsed or every core halted.
  /// Returns the number of cycles simulated.
  std::uint64_t run(std::uint64_t max_cycles);
  bool all_halted() const;

  const pe::CoreState& core(std::size_t t) const { return tiles_.at(t).core; }
  std::span<const std::uint32_t> memory(std::size_t t) const { return tiles_.at(t).mem; }
  std::span<std::uint32_t> memory(std::size_t t) { return tiles_.at(t).mem; }
  na::NetworkAdapter& adapter(std::size_t t) { return tiles_.at(t).na; }
  const na::NetworkAdapter& adapter(std::size_t t) const { return tiles_.at(t).na; }
  const noc::MeshNetwork& network() const { return mesh_; }
  debug::DebugFabric* fabric() { return fabric_.get(); }
  const debug::DebugFabric* fabric() const { return fabric_.get(); }

  /// Cores, memories, adapters and the mesh. Debug state is excluded.
  bool functional_equal(const SystemInstance& other) const;

  nlohmann::json stats() const;

 private:
  struct Tile {
    std::vector<std::uint32_t> mem;
    pe::CoreState core;
    na::NetworkAdapter na;
    bool pgas = false;
  };
  class TileBus;

  void inject_synthetic();

  PlatformConfiguration config_;
  SystemOptions options_;
  std::vector<Tile> tiles_;
  noc::MeshNetwork mesh_;
  std::unique_ptr<debug::DebugFabric> fabric_;
  std::mt19937_64 rng_;
  std::uint64_t cycle_ = 0;
};

/// Checks the configuration and builds the instance. Tiles without a program
/// run a single HALT. Throws ConfigError.
SystemInstance map_configuration(const PlatformConfiguration& config, const ProgramSet& programs,
                                 SystemOptions options = {});

}  // namespace tilesim::platform
