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
 * @file assembler.hpp
 * @brief Two-pass assembler for the tile ISA.
 *
 * One instruction, label or directive per line; `;` starts a comment.
 *
 *   loop:  ADDI r1, r1, -1      ; labels end with ':'
 *          BNE  r1, r0, loop
 *          LW   r2, 4(r3)
 *          .data                ; switch to the data section (placed after code)
 *   buf:   .word 0x1234, 7
 *          .space 8             ; eight zero words
 *
 * Immediates are decimal or 0x-hex, optionally negative; LI, LUI, ADDI and
 * memory offsets also accept a label, which resolves to its byte address.
 */
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tilesim::pe {

struct ProgramImage {
  std::uint32_t base = 0;
  std::vector<std::uint32_t> code;
  std::vector<std::uint32_t> data;
  std::map<std::string, std::uint32_t> symbols;

  std::uint32_t data_base() const { return base + static_cast<std::uint32_t>(code.size() * 4); }
  std::uint32_t end() const { return data_base() + static_cast<std::uint32_t>(data.size() * 4); }

  /// A one-word image holding HALT, used for tiles without a program.
  static ProgramImage halt_only();

  friend bool operator==(const ProgramImage&, const ProgramImage&) = default;
};

class AsmError : public std::runtime_error {
 public:
  AsmError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ParseError : public AsmError {
 public:
  using AsmError::AsmError;
};

class UndefinedLabel : public AsmError {
 public:
  UndefinedLabel(int line, const std::string& label)
      : AsmError(line, "undefined label '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class RangeError : public AsmError {
 public:
  using AsmError::AsmError;
};

ProgramImage assemble(std::string_view source, std::uint32_t base = 0);

}  // namespace tilesim::pe
