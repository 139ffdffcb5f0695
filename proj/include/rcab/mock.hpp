// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// In-process mock targets. A mock program is a loop-free list of
// instructions over a single accumulator:
//
//   LOAD i              acc = input[i], or 0 when i is out of bounds
//   EMIT id             record block hit `id`
//   VAL id              record value event (site `id`, acc)
//   IF <cmp> k GOTO L   jump forward to label L when `acc <cmp> k` holds
//   CRASH sig           terminate with signal `sig`
//   EXIT code           terminate with exit code `code`
//
// <cmp> is one of == != < <= > >=, and may be glued to k ("==4"). Labels are
// written "L:" before an instruction. Instructions are separated by
// newlines or ';'. Jumps must go strictly forward, so every instruction runs
// at most once and execution always terminates; running off the end is
// EXIT 0.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcab/error.hpp"
#include "rcab/model.hpp"
#include "rcab/trace_format.hpp"

namespace rcab {

enum class Opcode : std::uint8_t { Load, Emit, Val, If, Crash, Exit };
enum class Cmp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Instruction {
  Opcode op = Opcode::Exit;
  std::int64_t arg = 0;  // index, id, k, signal or exit code
  Cmp cmp = Cmp::Eq;
  std::size_t target = 0;  // resolved jump target for If
  std::string label;       // jump label for If

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct MockProgram {
  std::vector<Instruction> instructions;
  std::map<std::string, std::size_t> labels;

  friend bool operator==(const MockProgram&, const MockProgram&) = default;
};

namespace detail {

inline bool eval_cmp(Cmp c, std::int64_t a, std::int64_t b) {
  switch (c) {
    case Cmp::Eq: return a == b;
    case Cmp::Ne: return a != b;
    case Cmp::Lt: return a < b;
    case Cmp::Le: return a <= b;
    case Cmp::Gt: return a > b;
    case Cmp::Ge: return a >= b;
  }
  return false;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const auto start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::optional<Cmp> parse_cmp(std::string_view s, std::size_t& len) {
  static constexpr std::pair<std::string_view, Cmp> kOps[] = {
      {"==", Cmp::Eq}, {"!=", Cmp::Ne}, {"<=", Cmp::Le},
      {">=", Cmp::Ge}, {"<", Cmp::Lt},  {">", Cmp::Gt}};
  for (const auto& [text, cmp] : kOps) {
    if (s.starts_with(text)) {
      len = text.size();
      return cmp;
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline MockProgram parse_mock(std::string_view text,
                              const std::string& source = "",
                              std::size_t first_line = 1) {
  MockProgram p;
  std::map<std::size_t, std::size_t> jump_lines;  // instruction -> line
  std::size_t line_no = first_line - 1;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::size_t stmt_pos = 0;
    while (stmt_pos <= line.size()) {
      auto semi = line.find(';', stmt_pos);
      if (semi == std::string_view::npos) semi = line.size();
      auto stmt = line.substr(stmt_pos, semi - stmt_pos);
      const auto column = stmt_pos + 1;
      stmt_pos = semi + 1;
      auto fail = [&](const std::string& what) {
        throw ParseError(source, line_no, column, what);
      };

      auto words = detail::split_ws(stmt);
      // Leading "label:" tokens.
      while (!words.empty() && words.front().back() == ':') {
        const auto name = std::string(words.front().substr(
            0, words.front().size() - 1));
        if (name.empty()) fail("empty label");
        if (!p.labels.emplace(name, p.instructions.size()).second) {
          fail("duplicate label '" + name + "'");
        }
        words.erase(words.begin());
      }
      if (words.empty()) continue;

      Instruction ins;
      const auto op = words.front();
      auto int_arg = [&](std::size_t i) {
        std::int64_t v = 0;
        if (i >= words.size() || !detail::parse_decimal(words[i], v)) {
          fail("expected integer operand for " + std::string(op));
        }
        return v;
      };
      auto expect_arity = [&](std::size_t n) {
        if (words.size() != n) fail("wrong operand count for " + std::string(op));
      };
      if (op == "LOAD" || op == "EMIT" || op == "VAL" || op == "CRASH" ||
          op == "EXIT") {
        expect_arity(2);
        ins.arg = int_arg(1);
        ins.op = op == "LOAD"    ? Opcode::Load
                 : op == "EMIT"  ? Opcode::Emit
                 : op == "VAL"   ? Opcode::Val
                 : op == "CRASH" ? Opcode::Crash
                                 : Opcode::Exit;
        if (ins.arg < 0 && ins.op != Opcode::Exit) {
          fail("operand must be non-negative");
        }
        if ((ins.op == Opcode::Emit || ins.op == Opcode::Val) &&
            ins.arg > UINT32_MAX) {
          fail("site id out of range");
        }
      } else if (op == "IF") {
        // IF <cmp> k GOTO L   or   IF <cmp>k GOTO L
        std::vector<std::string_view> rest(words.begin() + 1, words.end());
        std::size_t len = 0;
        if (rest.empty()) fail("IF needs a comparison");
        const auto cmp = detail::parse_cmp(rest.front(), len);
        if (!cmp) fail("unknown comparison '" + std::string(rest.front()) + "'");
        ins.op = Opcode::If;
        ins.cmp = *cmp;
        std::vector<std::string_view> tail;
        if (rest.front().size() > len) tail.push_back(rest.front().substr(len));
        tail.insert(tail.end(), rest.begin() + 1, rest.end());
        if (tail.size() != 3 || tail[1] != "GOTO") {
          fail("expected IF <cmp> k GOTO <label>");
        }
        if (!detail::parse_decimal(tail[0], ins.arg)) fail("bad IF constant");
        ins.label = std::string(tail[2]);
        jump_lines[p.instructions.size()] = line_no;
      } else {
        fail("unknown instruction '" + std::string(op) + "'");
      }
      p.instructions.push_back(std::move(ins));
    }
  }
  for (auto& [index, line] : jump_lines) {
    auto& ins = p.instructions[index];
    const auto it = p.labels.find(ins.label);
    if (it == p.labels.end()) {
      throw ParseError(source, line, 0, "undefined label '" + ins.label + "'");
    }
    if (it->second <= index) {
      throw ParseError(source, line, 0,
                       "jump to '" + ins.label + "' must go forward");
    }
    ins.target = it->second;
  }
  return p;
}

// Runs `p` on `input`. The result is a pure function of (p, input, policy);
// born_at is left at 0 for the caller to stamp.
inline Sample interpret_mock(const MockProgram& p, const Bytes& input,
                             const CrashPolicy& policy = {}) {
  Sample s;
  s.input = input;
  std::int64_t acc = 0;
  Terminal terminal{TerminalKind::Exit, 0};
  std::size_t pc = 0;
  while (pc < p.instructions.size()) {
    const auto& ins = p.instructions[pc];
    ++pc;
    switch (ins.op) {
      case Opcode::Load:
        acc = static_cast<std::uint64_t>(ins.arg) < input.size()
                  ? input[static_cast<std::size_t>(ins.arg)]
                  : 0;
        break;
      case Opcode::Emit:
        s.trace.events.push_back(
            TraceEvent::block(static_cast<std::uint32_t>(ins.arg)));
        break;
      case Opcode::Val:
        s.trace.events.push_back(
            TraceEvent::val(static_cast<std::uint32_t>(ins.arg), acc));
        break;
      case Opcode::If:
        if (detail::eval_cmp(ins.cmp, acc, ins.arg)) pc = ins.target;
        break;
      case Opcode::Crash:
        terminal = {TerminalKind::Signal, static_cast<int>(ins.arg)};
        pc = p.instructions.size();
        break;
      case Opcode::Exit:
        terminal = {TerminalKind::Exit, static_cast<int>(ins.arg)};
        pc = p.instructions.size();
        break;
    }
  }
  s.trace.terminal = terminal;
  s.verdict = policy.classify(terminal);
  return s;
}

}  // namespace rcab
