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
 * @file isa.hpp
 * @brief The 13-instruction tile ISA and its 32-bit encoding.
 *
 *   [31:26] opcode   [25:22] rd   [21:18] ra   [17:14] rb   [15:0] imm16
 *
 * R-type (ADD, SUB, AND) uses rd/ra/rb, I-type uses rd/ra/imm16. Stores put
 * the source register in the rd field. Branches compare the rd and ra fields
 * and hold a signed word offset relative to pc+4. JMP holds an absolute word
 * index in [25:0].
 */
#pragma once

#include <cstdint>
#include <optional>

namespace tilesim::pe {

enum class Opcode : std::uint8_t {
  Nop = 0,
  Halt = 1,
  Li = 2,    // rd = sext(imm)
  Lui = 3,   // rd = imm << 16
  Add = 4,
  Sub = 5,
  And = 6,
  Addi = 7,  // rd = ra + sext(imm)
  Lw = 8,    // rd = mem[ra + sext(imm)]
  Sw = 9,    // mem[ra + sext(imm)] = rd
  Beq = 10,
  Bne = 11,
  Jmp = 12,
};

inline constexpr int kNumRegs = 16;
inline constexpr int kNumOpcodes = 13;

struct Instruction {
  Opcode op = Opcode::Nop;
  std::uint8_t rd = 0;
  std::uint8_t ra = 0;
  std::uint8_t rb = 0;
  std::int32_t imm = 0;  // sign-extended imm16, or the JMP word index
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

std::uint32_t encode(const Instruction& ins);
std::optional<Instruction> decode(std::uint32_t word);
const char* mnemonic(Opcode op);

}  // namespace tilesim::pe
