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

// Line-oriented trace file protocol written by instrumented targets:
//
//   RCAB1
//   B <block_id>
//   V <site_id> <signed-64-bit-decimal>
//   X <exit_code>   or   S <signal>
//
// Every line ends with '\n'. The terminal line is the last line and appears
// exactly once.

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "rcab/error.hpp"
#include "rcab/model.hpp"

namespace rcab {

inline constexpr std::string_view kTraceHeader = "RCAB1";

enum class TerminalPolicy : std::uint8_t {
  Required,
  // Stored traces of timed-out or broken runs have none.
  Optional,
};

namespace detail {

template <typename Int>
bool parse_decimal(std::string_view s, Int& out) {
  if (s.empty() || s.front() == '+') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace detail

inline Trace parse_trace(std::string_view text, const std::string& source = "",
                         TerminalPolicy policy = TerminalPolicy::Required) {
  Trace trace;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto fail = [&](std::size_t col, const std::string& what) -> void {
    throw ParseError(source, line_no, col, what);
  };
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) fail(0, "unterminated line");
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;

    if (line_no == 1) {
      if (line != kTraceHeader) fail(1, "missing RCAB1 header");
      continue;
    }
    if (trace.terminal) fail(1, "event after terminal line");
    if (line.size() < 3 || line[1] != ' ') fail(1, "malformed event line");

    const auto rest = line.substr(2);
    switch (line[0]) {
      case 'B': {
        std::uint32_t id = 0;
        if (!detail::parse_decimal(rest, id)) fail(3, "bad block id");
        trace.events.push_back(TraceEvent::block(id));
        break;
      }
      case 'V': {
        const auto sp = rest.find(' ');
        if (sp == std::string_view::npos) fail(3, "value line needs two fields");
        std::uint32_t site = 0;
        std::int64_t value = 0;
        if (!detail::parse_decimal(rest.substr(0, sp), site)) {
          fail(3, "bad value site id");
        }
        if (!detail::parse_decimal(rest.substr(sp + 1), value)) {
          fail(4 + sp, "bad value");
        }
        trace.events.push_back(TraceEvent::val(site, value));
        break;
      }
      case 'X':
      case 'S': {
        int code = 0;
        if (!detail::parse_decimal(rest, code)) fail(3, "bad terminal code");
        trace.terminal = Terminal{
            line[0] == 'X' ? TerminalKind::Exit : TerminalKind::Signal, code};
        break;
      }
      default:
        fail(1, "unknown event tag");
    }
  }
  if (line_no == 0) throw ParseError(source, 1, 1, "empty trace");
  if (!trace.terminal && policy == TerminalPolicy::Required) {
    throw ParseError(source, line_no, 0, "missing terminal line");
  }
  return trace;
}

inline std::string serialize_trace(const Trace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Block) {
      out += "B " + std::to_string(e.id) + '\n';
    } else {
      out += "V " + std::to_string(e.id) + ' ' + std::to_string(e.value) +
             '\n';
    }
  }
  if (trace.terminal) {
    out += trace.terminal->kind == TerminalKind::Exit ? "X " : "S ";
    out += std::to_string(trace.terminal->code);
    out += '\n';
  }
  return out;
}

}  // namespace rcab
