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

#include "tilesim/platform/system.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace tilesim::platform {

namespace {

constexpr std::uint64_t kTimestampLimit = 1ull << 32;

noc::RouterParams router_params(const PlatformConfiguration& c) {
  return {c.vcs, c.buffer_depth};
}

}  // namespace

class SystemInstance::TileBus final : public pe::Bus {
 public:
  explicit TileBus(Tile& t) : t_(t) {}

  pe::BusResult fetch(std::uint32_t addr) override {
    if (addr / 4 >= t_.mem.size()) return pe::BusResult::fault();
    return pe::BusResult::ok(t_.mem[addr / 4]);
  }
  pe::BusResult load(std::uint32_t addr) override { return access(addr, false, 0); }
  pe::BusResult store(std::uint32_t addr, std::uint32_t value) override { return access(addr, true, value); }

 private:
  pe::BusResult access(std::uint32_t addr, bool is_write, std::uint32_t value) {
    if (pe::in_mmio_window(addr)) return t_.na.mmio_access(addr - pe::kMmioBase, is_write, value, t_.mem);
    if (t_.pgas) return t_.na.pgas_access(addr, is_write, value, t_.mem);
    if (addr / 4 >= t_.mem.size()) return pe::BusResult::fault();
    if (is_write) t_.mem[addr / 4] = value;
    return pe::BusResult::ok(is_write ? 0 : t_.mem[addr / 4]);
  }

  Tile& t_;
};

SystemInstance::SystemInstance(PlatformConfiguration config, const ProgramSet& programs, SystemOptions options)
    : config_(std::move(config)),
      options_(options),
      mesh_(config_.width, config_.height, router_params(config_)),
      rng_(options.seed) {
  if (!(options.traffic_rate >= 0.0 && options.traffic_rate <= 1.0)) {
    throw ConfigError("traffic rate must lie in [0, 1]");
  }
  const auto n = static_cast<std::uint32_t>(config_.tiles.size());
  for (const auto& [id, _] : programs) {
    if (id >= n) throw ConfigError("program for unknown tile " + std::to_string(id));
  }
  tiles_.reserve(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    // Lists in a hand-written configuration need not be in id order.
    const auto& tc = *std::find_if(config_.tiles.begin(), config_.tiles.end(),
                                   [&](const TileConfig& c) { return c.id == t; });
    const auto& ac = *std::find_if(config_.adapters.begin(), config_.adapters.end(),
                                   [&](const AdapterConfig& a) { return a.tile == t; });
    na::NaParams p;
    p.tile = t;
    p.num_tiles = n;
    p.memory_bytes = tc.memory_bytes;
    p.recv_queue_depth = ac.recv_queue_depth;
    p.max_dma_inflight = ac.max_dma_inflight;
    p.partition_bytes = ac.partition_bytes;
    Tile tile{std::vector<std::uint32_t>(tc.memory_bytes / 4, 0), pe::CoreState{}, na::NetworkAdapter(p),
              tc.org == MemoryOrg::Pgas};

    const auto it = programs.find(t);
    const auto image = it != programs.end() ? it->second : pe::ProgramImage::halt_only();
    if (image.base % 4 != 0 || image.end() > tc.memory_bytes || image.end() < image.base) {
      throw ConfigError("program for tile " + std::to_string(t) + " does not fit its local memory");
    }
    std::copy(image.code.begin(), image.code.end(), tile.mem.begin() + image.base / 4);
    std::copy(image.data.begin(), image.data.end(), tile.mem.begin() + image.data_base() / 4);
    tile.core.pc = image.base;
    tiles_.push_back(std::move(tile));
  }
  if (config_.debug_enabled) {
    fabric_ = std::make_unique<debug::DebugFabric>(debug::FabricParams{
        config_.width, config_.height, static_cast<std::uint16_t>(config_.nocstat_window), 4});
  }
}

SystemInstance map_configuration(const PlatformConfiguration& config, const ProgramSet& programs,
                                 SystemOptions options) {
  check_configuration(config);
  return SystemInstance(config, programs, options);
}

void SystemInstance::inject_synthetic() {
  const auto n = tiles_.size();
  if (options_.traffic_rate <= 0.0 || n < 2) return;
  std::bernoulli_distribution fire(options_.traffic_rate);
  for (std::size_t t = 0; t < n; ++t) {
    if (!fire(rng_)) continue;
    auto& na = tiles_[t].na;
    if (na.outbound_backlog() >= 8) continue;  // keep the offered load bounded
    auto dst = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng_);
    if (dst >= t) ++dst;
    std::vector<std::uint32_t> payload(std::uniform_int_distribution<std::size_t>(0, 8)(rng_));
    for (auto& w : payload) w = static_cast<std::uint32_t>(rng_());
    na.send_synthetic(static_cast<noc::TileId>(dst), payload);
  }
}

void SystemInstance::tick() {
  if (fabric_ && cycle_ >= kTimestampLimit) {
    throw std::overflow_error("debug timestamps are 32 bits; disable debug for longer runs");
  }
  inject_synthetic();

  const auto n = tiles_.size();
  std::vector<std::optional<noc::Flit>> injections(n);
  for (std::size_t t = 0; t < n; ++t) injections[t] = tiles_[t].na.next_injection(mesh_);
  const auto ejected = mesh_.tick(injections);
  for (std::size_t t = 0; t < n; ++t) {
    if (ejected[t]) tiles_[t].na.on_ejected(*ejected[t], tiles_[t].mem);
  }

  std::vector<debug::TileObservation> obs(n);
  for (std::size_t t = 0; t < n; ++t) {
    auto& tile = tiles_[t];
    TileBus bus(tile);
    const auto r = pe::step(tile.core, bus, cycle_);
    obs[t].retire = r.retire;
    obs[t].fault = r.fault;
    obs[t].na_events = tile.na.take_events();
  }

  if (fabric_) {
    fabric_->observe(cycle_, obs, mesh_.last_departures());
    fabric_->tick_ring(cycle_);
  }
  ++cycle_;
}

bool SystemInstance::all_halted() const {
  return std::all_of(tiles_.begin(), tiles_.end(), [](const Tile& t) { return t.core.halted; });
}

std::uint64_t SystemInstance::run(std::uint64_t max_cycles) {
  std::uint64_t done = 0;
  while (done < max_cycles && !all_halted()) {
    tick();
    ++done;
  }
  return done;
}

bool SystemInstance::functional_equal(const SystemInstance& o) const {
  if (cycle_ != o.cycle_ || tiles_.size() != o.tiles_.size() || !(mesh_ == o.mesh_)) return false;
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    const auto& a = tiles_[t];
    const auto& b = o.tiles_[t];
    if (a.mem != b.mem || !(a.core == b.core) || !(a.na == b.na)) return false;
  }
  return true;
}

nlohmann::json SystemInstance::stats() const {
  using nlohmann::json;
  static constexpr const char* kPortNames[] = {"N", "E", "S", "W", "L"};
  json routers = json::array();
  for (std::size_t r = 0; r < tiles_.size(); ++r) {
    const auto c = mesh_.coord_of(static_cast<noc::TileId>(r));
    json flits = json::object();
    for (std::size_t p = 0; p < noc::kNumPorts; ++p) flits[kPortNames[p]] = mesh_.total_departures()[r][p];
    routers.push_back({{"id", r}, {"x", c.x}, {"y", c.y}, {"flits", flits}});
  }
  json tiles = json::array();
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    const auto& tile = tiles_[t];
    const auto& s = tile.na.stats();
    json fault = nullptr;
    if (tile.core.fault) {
      fault = {{"kind", tile.core.fault->kind == pe::FaultKind::MemoryFault ? "MemoryFault" : "IllegalInstruction"},
               {"pc", tile.core.fault->pc},
               {"addr", tile.core.fault->addr}};
    }
    tiles.push_back({{"id", t},
                     {"retired", tile.core.retired},
                     {"halted", tile.core.halted},
                     {"fault", fault},
                     {"messages_sent", s.messages_sent},
                     {"messages_received", s.messages_received},
                     {"messages_dropped", s.messages_dropped},
                     {"synthetic_sent", s.synthetic_sent},
                     {"synthetic_received", s.synthetic_received},
                     {"requests_serviced", s.requests_serviced},
                     {"dma_completed", s.dma_completed}});
  }
  return {{"cycles", cycle_},
          {"seed", options_.seed},
          {"all_halted", all_halted()},
          {"network", {{"flits_injected", mesh_.flits_injected()}, {"flits_ejected", mesh_.flits_ejected()}}},
          {"routers", routers},
          {"tiles", tiles}};
}

}  // namespace tilesim::platform
