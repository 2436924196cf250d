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
 * @file fabric.hpp
 * @brief Debug modules on the 16-bit debug ring, plus the external interface.
 *
 * Module ids double as ring node indices: 0 is the external interface, then
 * one CORE_TRACE module per tile, then one NOC_STAT module per router.
 *
 * The fabric only observes the functional system. Per cycle the owner calls
 * observe() with that cycle's retirements, faults, adapter events and link
 * departures, then tick_ring() once.
 */
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "tilesim/debug/itrace.hpp"
#include "tilesim/debug/packet.hpp"
#include "tilesim/debug/trigger.hpp"
#include "tilesim/na/adapter.hpp"
#include "tilesim/noc/ring.hpp"
#include "tilesim/noc/router.hpp"
#include "tilesim/pe/core.hpp"

namespace tilesim::debug {

inline constexpr std::uint16_t kModuleVersion = 1;
inline constexpr std::uint16_t kDefaultNocStatWindow = 256;
inline constexpr std::uint64_t kWatermarkInterval = 64;

struct FabricParams {
  int width = 1;
  int height = 1;
  std::uint16_t nocstat_window = kDefaultNocStatWindow;
  std::size_t ring_depth = 4;
};

/// Module list for a mesh, in id order.
std::vector<ModuleDescriptor> module_layout(int width, int height);

struct TileObservation {
  std::optional<pe::RetireEvent> retire;
  std::optional<pe::Fault> fault;
  std::vector<na::NaEvent> na_events;
};

struct CollectionChange {
  enum class Cause : std::uint8_t { Register, Trigger, CrossTrigger } cause;
  std::uint64_t cycle = 0;
  ModuleId module = 0;
  bool enabled = false;
};

struct BroadcastRecord {
  ModuleId origin = 0;
  TriggerAction action = TriggerAction::StopCollection;
  std::uint64_t fired = 0;
  std::optional<std::uint64_t> tail_injected;
};

class DebugFabric {
 public:
  explicit DebugFabric(FabricParams params);

  std::size_t module_count() const { return modules_.size(); }
  const ModuleDescriptor& descriptor(ModuleId id) const { return modules_.at(id).desc; }
  bool collecting(ModuleId id) const { return modules_.at(id).enabled; }

  void observe(std::uint64_t cycle, std::span<const TileObservation> tiles,
               std::span<const std::array<std::uint8_t, noc::kNumPorts>> departures);
  void tick_ring(std::uint64_t cycle);

  /// Emits pending compressed runs and partial NOCSTAT windows; `now` is the
  /// number of cycles simulated.
  void flush(std::uint64_t now);

  /// A control packet from the host, handled at the external interface.
  void host_send(const DebugPacket& p, std::uint64_t cycle);
  /// Packets that reached the external interface for the host, in order.
  std::vector<DebugPacket> take_host_output();

  bool idle() const;
  bool run_requested() const { return run_requested_; }

  const std::vector<TraceEvent>& emission_log() const { return emission_log_; }
  const std::vector<CollectionChange>& collection_log() const { return collection_log_; }
  const std::vector<BroadcastRecord>& broadcast_log() const { return broadcast_log_; }
  const noc::RingNetwork& ring() const { return ring_; }

  // Direct register access, as a REG_WRITE/REG_READ arriving at the module would do.
  void write_register(ModuleId id, std::uint16_t reg, std::uint16_t value, std::uint64_t cycle);
  std::optional<std::uint16_t> read_register(ModuleId id, std::uint16_t reg) const;

 private:
  struct OutPacket {
    std::vector<std::uint16_t> flits;
    std::optional<std::size_t> broadcast;
  };
  struct Outbox {
    std::deque<OutPacket> packets;
    std::size_t next = 0;
  };
  struct Module {
    ModuleDescriptor desc;
    bool enabled = false;
    bool trigger_input = true;
    std::uint16_t window = kDefaultNocStatWindow;

    TriggerCondition cond = TriggerCondition::None;
    std::uint32_t arg = 0;
    std::uint16_t trig_window = kDefaultNocStatWindow;
    TriggerAction action = TriggerAction::StartCollection;
    TriggerScope scope = TriggerScope::Local;
    bool armed = false;
    std::uint16_t trig_error = 0;

    std::uint64_t observed = 0;
    ItraceCompressor compressor;
    std::array<std::uint32_t, noc::kNumPorts> stat_counts{};
    std::uint64_t stat_start = 0;
    std::uint32_t stat_index = 0;
    std::array<std::uint32_t, noc::kNumPorts> trig_counts{};
    std::uint64_t trig_start = 0;

    std::array<Outbox, 2> out;  // by ring lane
    std::deque<std::uint32_t> undelivered;  // timestamps of events still on their way to the extif
  };

  void emit(Module& m, std::uint64_t cycle, PacketType kind, std::vector<std::uint16_t> payload);
  void send(Module& m, noc::RingLane lane, const DebugPacket& p, std::optional<std::size_t> bc = {});
  bool set_enabled(Module& m, bool on, std::uint64_t cycle, CollectionChange::Cause cause);
  void fire(Module& m, std::uint64_t cycle);
  void observe_core(Module& m, std::uint64_t cycle, const TileObservation& t);
  void observe_router(Module& m, std::uint64_t cycle, const std::array<std::uint8_t, noc::kNumPorts>& dep);
  void deliver(std::size_t node, const DebugPacket& p, std::uint64_t cycle);
  DebugPacket descriptor_reply(const Module& m, std::uint64_t cycle) const;

  FabricParams params_;
  std::vector<Module> modules_;
  std::size_t num_tiles_ = 0;
  noc::RingNetwork ring_;
  std::vector<DebugPacket> host_out_;
  bool run_requested_ = false;
  std::uint32_t last_watermark_ = 0;

  std::vector<TraceEvent> emission_log_;
  std::vector<CollectionChange> collection_log_;
  std::vector<BroadcastRecord> broadcast_log_;
};

}  // namespace tilesim::debug
