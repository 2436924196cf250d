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
#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace tilesim::pe {

inline constexpr std::uint32_t kMmioBase = 0xFFFF'0000u;
inline constexpr std::uint32_t kMmioSize = 0x100u;

inline constexpr bool in_mmio_window(std::uint32_t addr) {
  return addr >= kMmioBase && addr < kMmioBase + kMmioSize;
}

enum class FaultKind : std::uint8_t { MemoryFault = 1, IllegalInstruction = 2 };

struct Fault {
  FaultKind kind;
  std::uint32_t pc;
  std::uint32_t addr;  // faulting data address, or the instruction word
  friend bool operator==(const Fault&, const Fault&) = default;
};

/// Outcome of a single bus access. Stall asks the core to retry the same
/// instruction next cycle without retiring it.
struct BusResult {
  enum class Status : std::uint8_t { Ok, Stall, Fault } status = Status::Ok;
  std::uint32_t value = 0;

  static BusResult ok(std::uint32_t v = 0) { return {Status::Ok, v}; }
  static BusResult stall() { return {Status::Stall, 0}; }
  static BusResult fault() { return {Status::Fault, 0}; }
};

class Bus {
 public:
  virtual ~Bus() = default;
  virtual BusResult fetch(std::uint32_t addr) = 0;
  virtual BusResult load(std::uint32_t addr) = 0;
  virtual BusResult store(std::uint32_t addr, std::uint32_t value) = 0;
};

struct CoreState {
  std::uint32_t pc = 0;
  std::array<std::uint32_t, 16> regs{};
  bool halted = false;
  std::optional<Fault> fault;
  std::uint64_t retired = 0;

  friend bool operator==(const CoreState&, const CoreState&) = default;
};

struct RetireEvent {
  std::uint32_t pc;
  std::uint64_t cycle;
  friend bool operator==(const RetireEvent&, const RetireEvent&) = default;
};

struct StepResult {
  enum class Status : std::uint8_t { Retired, Stalled, Halted, Faulted } status;
  std::optional<RetireEvent> retire;  // set iff Retired
  std::optional<Fault> fault;         // set iff Faulted
};

/// Executes at most one instruction. Halted cores do nothing. A fault halts
/// the core and records the Fault; nothing retires in that step.
StepResult step(CoreState& core, Bus& bus, std::uint64_t cycle);

}  // namespace tilesim::pe
