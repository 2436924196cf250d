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

#include "tilesim/pe/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

#include "tilesim/pe/isa.hpp"

namespace tilesim::pe {

namespace {

struct Statement {
  int line = 0;
  bool in_data = false;
  std::uint32_t addr = 0;
  std::string op;  // upper-cased mnemonic or directive
  std::vector<std::string> args;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

bool is_label_name(std::string_view s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(first) || s.front() == '_' || s.front() == '.')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '.';
  });
}

std::vector<std::string> split_args(std::string_view s, int line) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (piece.empty()) throw ParseError(line, "empty operand");
    out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_number(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  int radix = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    radix = 16;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, radix);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v > 0xFFFF'FFFFull) return std::nullopt;
  return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, std::uint32_t>& symbols) : symbols_(symbols) {}

  std::uint8_t reg(const std::string& s, int line) const {
    const auto u = upper(s);
    if (u.size() >= 2 && u[0] == 'R') {
      if (auto n = parse_number(std::string_view(u).substr(1)); n && *n >= 0 && *n < kNumRegs &&
                                                               u.find_first_not_of("0123456789", 1) ==
                                                                   std::string::npos) {
        return static_cast<std::uint8_t>(*n);
      }
    }
    throw ParseError(line, "bad register '" + s + "'");
  }

  std::int64_t value(const std::string& s, int line) const {
    if (auto n = parse_number(s)) return *n;
    if (is_label_name(s)) {
      const auto it = symbols_.find(s);
      if (it == symbols_.end()) throw UndefinedLabel(line, s);
      return it->second;
    }
    throw ParseError(line, "bad immediate '" + s + "'");
  }

  std::uint32_t label(const std::string& s, int line) const {
    if (!is_label_name(s)) throw ParseError(line, "expected label, got '" + s + "'");
    const auto it = symbols_.find(s);
    if (it == symbols_.end()) throw UndefinedLabel(line, s);
    return it->second;
  }

 private:
  const std::map<std::string, std::uint32_t>& symbols_;
};

std::int32_t check_imm16(std::int64_t v, int line) {
  if (v < -32768 || v > 32767) {
    throw RangeError(line, "immediate " + std::to_string(v) + " outside signed 16-bit range");
  }
  return static_cast<std::int32_t>(v);
}

void expect_args(const Statement& st, std::size_t n) {
  if (st.args.size() != n) {
    throw ParseError(st.line, st.op + " takes " + std::to_string(n) + " operand(s), got " +
                                  std::to_string(st.args.size()));
  }
}

// "off(rX)" -> {off, rX}
std::pair<std::string, std::string> split_mem_operand(const std::string& s, int line) {
  const auto open = s.find('(');
  const auto close = s.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != s.size()) {
    throw ParseError(line, "expected off(reg), got '" + s + "'");
  }
  auto off = std::string(trim(std::string_view(s).substr(0, open)));
  if (off.empty()) off = "0";
  return {off, std::string(trim(std::string_view(s).substr(open + 1, close - open - 1)))};
}

const std::map<std::string, Opcode>& opcodes() {
  static const std::map<std::string, Opcode> table = {
      {"NOP", Opcode::Nop}, {"HALT", Opcode::Halt}, {"LI", Opcode::Li},   {"LUI", Opcode::Lui},
      {"ADD", Opcode::Add}, {"SUB", Opcode::Sub},   {"AND", Opcode::And}, {"ADDI", Opcode::Addi},
      {"LW", Opcode::Lw},   {"SW", Opcode::Sw},     {"BEQ", Opcode::Beq}, {"BNE", Opcode::Bne},
      {"JMP", Opcode::Jmp},
  };
  return table;
}

Instruction build(const Statement& st, const Resolver& r) {
  const auto op = opcodes().at(st.op);
  Instruction ins;
  ins.op = op;
  switch (op) {
    case Opcode::Nop:
    case Opcode::Halt:
      expect_args(st, 0);
      break;
    case Opcode::Li:
      expect_args(st, 2);
      ins.rd = r.reg(st.args[0], st.line);
      ins.imm = check_imm16(r.value(st.args[1], st.line), st.line);
      break;
    case Opcode::Lui: {
      expect_args(st, 2);
      ins.rd = r.reg(st.args[0], st.line);
      const auto v = r.value(st.args[1], st.line);
      if (v < -32768 || v > 0xFFFF) throw RangeError(st.line, "LUI immediate outside 16 bits");
      ins.imm = static_cast<std::int32_t>(v & 0xFFFF);
      break;
    }
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::And:
      expect_args(st, 3);
      ins.rd = r.reg(st.args[0], st.line);
      ins.ra = r.reg(st.args[1], st.line);
      ins.rb = r.reg(st.args[2], st.line);
      break;
    case Opcode::Addi:
      expect_args(st, 3);
      ins.rd = r.reg(st.args[0], st.line);
      ins.ra = r.reg(st.args[1], st.line);
      ins.imm = check_imm16(r.value(st.args[2], st.line), st.line);
      break;
    case Opcode::Lw:
    case Opcode::Sw: {
      expect_args(st, 2);
      ins.rd = r.reg(st.args[0], st.line);
      const auto [off, base] = split_mem_operand(st.args[1], st.line);
      ins.ra = r.reg(base, st.line);
      ins.imm = check_imm16(r.value(off, st.line), st.line);
      break;
    }
    case Opcode::Beq:
    case Opcode::Bne: {
      expect_args(st, 3);
      ins.rd = r.reg(st.args[0], st.line);
      ins.ra = r.reg(st.args[1], st.line);
      const auto target = static_cast<std::int64_t>(r.label(st.args[2], st.line));
      const auto delta = (target - static_cast<std::int64_t>(st.addr) - 4) / 4;
      ins.imm = check_imm16(delta, st.line);
      break;
    }
    case Opcode::Jmp: {
      expect_args(st, 1);
      const auto target = r.label(st.args[0], st.line);
      if (target / 4 >= (1u << 26)) throw RangeError(st.line, "jump target out of range");
      ins.imm = static_cast<std::int32_t>(target / 4);
      break;
    }
  }
  return ins;
}

}  // namespace

ProgramImage ProgramImage::halt_only() {
  ProgramImage img;
  img.code.push_back(encode(Instruction{Opcode::Halt}));
  return img;
}

ProgramImage assemble(std::string_view source, std::uint32_t base) {
  if (base % 4 != 0) throw std::invalid_argument("program base must be word aligned");

  std::vector<Statement> statements;
  std::vector<std::pair<std::string, std::pair<bool, std::uint32_t>>> labels;  // name -> (data?, offset)
  std::map<std::string, int> label_lines;
  std::uint32_t code_words = 0;
  std::uint32_t data_words = 0;
  bool in_data = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    auto line = source.substr(pos, nl == std::string_view::npos ? source.npos : nl - pos);
    pos = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;
    ++line_no;

    if (const auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
    line = trim(line);

    while (true) {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) break;
      const auto name = trim(line.substr(0, colon));
      if (!is_label_name(name)) throw ParseError(line_no, "bad label '" + std::string(name) + "'");
      if (label_lines.contains(std::string(name))) {
        throw ParseError(line_no, "duplicate label '" + std::string(name) + "'");
      }
      label_lines.emplace(std::string(name), line_no);
      labels.push_back({std::string(name), {in_data, in_data ? data_words : code_words}});
      line = trim(line.substr(colon + 1));
    }
    if (line.empty()) continue;

    const auto space = line.find_first_of(" \t");
    Statement st;
    st.line = line_no;
    st.op = upper(line.substr(0, space));
    st.args = split_args(space == std::string_view::npos ? std::string_view{} : line.substr(space), line_no);

    if (st.op == ".TEXT" || st.op == ".DATA") {
      if (!st.args.empty()) throw ParseError(line_no, st.op + " takes no operands");
      in_data = st.op == ".DATA";
      continue;
    }
    st.in_data = in_data;
    if (st.op == ".WORD") {
      if (st.args.empty()) throw ParseError(line_no, ".word needs at least one value");
      if (!in_data) throw ParseError(line_no, ".word is only allowed in the data section");
      st.addr = data_words;
      data_words += static_cast<std::uint32_t>(st.args.size());
    } else if (st.op == ".SPACE") {
      if (!in_data) throw ParseError(line_no, ".space is only allowed in the data section");
      expect_args(st, 1);
      const auto n = parse_number(st.args[0]);
      if (!n || *n < 0 || *n > (1 << 24)) throw ParseError(line_no, "bad .space size");
      st.addr = data_words;
      data_words += static_cast<std::uint32_t>(*n);
    } else if (opcodes().contains(st.op)) {
      if (in_data) throw ParseError(line_no, "instruction in data section");
      st.addr = code_words;
      ++code_words;
    } else {
      throw ParseError(line_no, "unknown mnemonic '" + st.op + "'");
    }
    statements.push_back(std::move(st));
  }

  ProgramImage img;
  img.base = base;
  const auto data_base = base + code_words * 4;
  for (const auto& [name, where] : labels) {
    img.symbols[name] = (where.first ? data_base : base) + where.second * 4;
  }

  Resolver resolver(img.symbols);
  img.code.reserve(code_words);
  img.data.assign(data_words, 0);
  for (auto& st : statements) {
    if (st.op == ".SPACE") continue;
    if (st.op == ".WORD") {
      for (std::size_t i = 0; i < st.args.size(); ++i) {
        const auto v = resolver.value(st.args[i], st.line);
        if (v < -0x8000'0000ll || v > 0xFFFF'FFFFll) throw RangeError(st.line, ".word value out of range");
        img.data[st.addr + i] = static_cast<std::uint32_t>(v);
      }
      continue;
    }
    st.addr = base + st.addr * 4;
    img.code.push_back(encode(build(st, resolver)));
  }
  return img;
}

}  // namespace tilesim::pe
