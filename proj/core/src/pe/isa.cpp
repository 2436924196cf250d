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

#include "tilesim/pe/isa.hpp"

namespace tilesim::pe {

const char* mnemonic(Opcode op) {
  switch (op) {
    case Opcode::Nop: return "NOP";
    case Opcode::Halt: return "HALT";
    case Opcode::Li: return "LI";
    case Opcode::Lui: return "LUI";
    case Opcode::Add: return "ADD";
    case Opcode::Sub: return "SUB";
    case Opcode::And: return "AND";
    case Opcode::Addi: return "ADDI";
    case Opcode::Lw: return "LW";
    case Opcode::Sw: return "SW";
    case Opcode::Beq: return "BEQ";
    case Opcode::Bne: return "BNE";
    case Opcode::Jmp: return "JMP";
  }
  return "?";
}

std::uint32_t encode(const Instruction& ins) {
  std::uint32_t w = static_cast<std::uint32_t>(ins.op) << 26;
  if (ins.op == Opcode::Jmp) return w | (static_cast<std::uint32_t>(ins.imm) & 0x03FF'FFFFu);
  w |= static_cast<std::uint32_t>(ins.rd & 0xF) << 22;
  w |= static_cast<std::uint32_t>(ins.ra & 0xF) << 18;
  switch (ins.op) {
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::And:
      w |= static_cast<std::uint32_t>(ins.rb & 0xF) << 14;
      break;
    default:
      w |= static_cast<std::uint32_t>(ins.imm) & 0xFFFFu;
      break;
  }
  return w;
}

std::optional<Instruction> decode(std::uint32_t word) {
  const auto op = word >> 26;
  if (op >= kNumOpcodes) return std::nullopt;
  Instruction ins;
  ins.op = static_cast<Opcode>(op);
  if (ins.op == Opcode::Jmp) {
    ins.imm = static_cast<std::int32_t>(word & 0x03FF'FFFFu);
    return ins;
  }
  ins.rd = static_cast<std::uint8_t>((word >> 22) & 0xF);
  ins.ra = static_cast<std::uint8_t>((word >> 18) & 0xF);
  switch (ins.op) {
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::And:
      ins.rb = static_cast<std::uint8_t>((word >> 14) & 0xF);
      break;
    case Opcode::Lui:
      ins.imm = static_cast<std::int32_t>(word & 0xFFFFu);
      break;
    default:
      ins.imm = static_cast<std::int16_t>(word & 0xFFFFu);
      break;
  }
  return ins;
}

}  // namespace tilesim::pe
