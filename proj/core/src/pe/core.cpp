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

#include "tilesim/pe/core.hpp"

#include "tilesim/pe/isa.hpp"

namespace tilesim::pe {

namespace {

StepResult fault(CoreState& core, FaultKind kind, std::uint32_t addr) {
  const Fault f{kind, core.pc, addr};
  core.halted = true;
  core.fault = f;
  return {StepResult::Status::Faulted, std::nullopt, f};
}

}  // namespace

StepResult step(CoreState& core, Bus& bus, std::uint64_t cycle) {
  if (core.halted) return {StepResult::Status::Halted, std::nullopt, std::nullopt};
  if (core.pc % 4 != 0) return fault(core, FaultKind::MemoryFault, core.pc);

  const auto fetched = bus.fetch(core.pc);
  if (fetched.status == BusResult::Status::Stall) return {StepResult::Status::Stalled, {}, {}};
  if (fetched.status == BusResult::Status::Fault) return fault(core, FaultKind::MemoryFault, core.pc);
  const auto ins = decode(fetched.value);
  if (!ins) return fault(core, FaultKind::IllegalInstruction, fetched.value);

  auto& r = core.regs;
  const auto ra = r[ins->ra];
  const auto rb = r[ins->rb];
  const auto imm = static_cast<std::uint32_t>(ins->imm);
  std::uint32_t next = core.pc + 4;
  std::optional<std::uint32_t> write;

  switch (ins->op) {
    case Opcode::Nop: break;
    case Opcode::Halt: core.halted = true; break;
    case Opcode::Li: write = imm; break;
    case Opcode::Lui: write = imm << 16; break;
    case Opcode::Add: write = ra + rb; break;
    case Opcode::Sub: write = ra - rb; break;
    case Opcode::And: write = ra & rb; break;
    case Opcode::Addi: write = ra + imm; break;
    case Opcode::Lw: {
      const auto addr = ra + imm;
      if (addr % 4 != 0) return fault(core, FaultKind::MemoryFault, addr);
      const auto res = bus.load(addr);
      if (res.status == BusResult::Status::Stall) return {StepResult::Status::Stalled, {}, {}};
      if (res.status == BusResult::Status::Fault) return fault(core, FaultKind::MemoryFault, addr);
      write = res.value;
      break;
    }
    case Opcode::Sw: {
      const auto addr = ra + imm;
      if (addr % 4 != 0) return fault(core, FaultKind::MemoryFault, addr);
      const auto res = bus.store(addr, r[ins->rd]);
      if (res.status == BusResult::Status::Stall) return {StepResult::Status::Stalled, {}, {}};
      if (res.status == BusResult::Status::Fault) return fault(core, FaultKind::MemoryFault, addr);
      break;
    }
    case Opcode::Beq:
      if (r[ins->rd] == ra) next = core.pc + 4 + imm * 4;
      break;
    case Opcode::Bne:
      if (r[ins->rd] != ra) next = core.pc + 4 + imm * 4;
      break;
    case Opcode::Jmp: next = imm * 4; break;
  }

  if (write && ins->rd != 0) r[ins->rd] = *write;
  const RetireEvent ev{core.pc, cycle};
  core.pc = next;
  ++core.retired;
  return {StepResult::Status::Retired, ev, std::nullopt};
}

}  // namespace tilesim::pe
