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

// Target manifests. Plain text; '#' starts a comment.
//
//   id = offbyone
//   exec = ./offbyone @@          # @@ is replaced by the input file path
//   input_mode = FileArg          # or Stdin
//   timeout_ms = 1000
//   crash_signals = 11 6 7 8      # default when omitted
//   crash_exit_codes =            # empty by default
//   seeds = seeds/crash.bin       # paths relative to the manifest
//
//   [block_map]
//   <id> <file>:<line> [cond]     # cond marks branch-dependent blocks
//
//   [value_map]                   # optional; value sites fall back to
//   <id> <file>:<line>            # block_map ids when absent
//
//   [ground_truth]
//   <file>:<line> [free-text note]
//
//   [mock]                        # optional in-process program; see mock.hpp
//   EMIT 1
//   ...
//
// Either `exec` or a [mock] section must be present.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rcab/dataset_io.hpp"
#include "rcab/error.hpp"
#include "rcab/mock.hpp"
#include "rcab/model.hpp"

namespace rcab {

enum class InputMode : std::uint8_t { FileArg, Stdin };

inline constexpr std::string_view kInputPlaceholder = "@@";

struct TargetSpec {
  std::string id;
  std::vector<std::string> exec;  // argv template
  InputMode input_mode = InputMode::FileArg;
  std::uint64_t timeout_ms = 1000;
  CrashPolicy crash;
  std::vector<BlockSite> block_map;
  std::vector<BlockSite> value_map;
  GroundTruth ground_truth;
  std::vector<std::filesystem::path> seeds;
  std::filesystem::path base_dir;
  std::optional<MockProgram> mock;

  const BlockSite* block_site(std::uint32_t id) const {
    for (const auto& b : block_map) {
      if (b.id == id) return &b;
    }
    return nullptr;
  }

  const BlockSite* value_site(std::uint32_t id) const {
    if (value_map.empty()) return block_site(id);
    for (const auto& v : value_map) {
      if (v.id == id) return &v;
    }
    return nullptr;
  }

  // Value sites as a list, resolving the block_map fallback.
  const std::vector<BlockSite>& value_sites() const {
    return value_map.empty() ? block_map : value_map;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Parses "<file>:<line>"; the last ':' separates the line number.
inline std::optional<Location> parse_location(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  std::uint32_t line = 0;
  if (!parse_decimal(s.substr(colon + 1), line) || line == 0) {
    return std::nullopt;
  }
  return Location{std::string(s.substr(0, colon)), line};
}

}  // namespace detail

inline void validate(const TargetSpec& spec) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("target '" + spec.id + "': " + what);
  };
  if (spec.id.empty()) throw ValidationError("target id must be non-empty");
  if (spec.exec.empty() && !spec.mock) {
    fail("needs an exec command or a [mock] program");
  }
  if (!spec.exec.empty()) {
    const auto placeholders = std::count(spec.exec.begin(), spec.exec.end(),
                                         std::string(kInputPlaceholder));
    if (spec.input_mode == InputMode::FileArg && placeholders != 1) {
      fail("FileArg input mode needs exactly one @@ placeholder in exec");
    }
    if (spec.input_mode == InputMode::Stdin && placeholders != 0) {
      fail("Stdin input mode must not use the @@ placeholder");
    }
  }
  if (spec.timeout_ms == 0) fail("timeout_ms must be positive");
  if (spec.seeds.empty()) fail("seeds must be non-empty");
  for (const auto& s : spec.seeds) {
    if (!std::filesystem::is_regular_file(s)) {
      fail("seed file not found: " + s.string());
    }
  }
  std::set<std::uint32_t> ids;
  for (const auto& b : spec.block_map) {
    if (!ids.insert(b.id).second) {
      fail("block id " + std::to_string(b.id) + " is not unique");
    }
  }
  ids.clear();
  for (const auto& v : spec.value_map) {
    if (!ids.insert(v.id).second) {
      fail("value site id " + std::to_string(v.id) + " is not unique");
    }
  }
  if (spec.ground_truth.candidates.empty()) {
    fail("ground_truth must have at least one candidate");
  }
  for (const auto& loc : spec.ground_truth.candidates) {
    auto at = [&](const BlockSite& b) { return b.location == loc; };
    if (std::none_of(spec.block_map.begin(), spec.block_map.end(), at) &&
        std::none_of(spec.value_map.begin(), spec.value_map.end(), at)) {
      fail("ground-truth location " + loc.to_string() +
           " is not in block_map");
    }
  }
  if (spec.mock) {
    for (const auto& ins : spec.mock->instructions) {
      const auto id = static_cast<std::uint32_t>(ins.arg);
      if (ins.op == Opcode::Emit && !spec.block_site(id)) {
        fail("mock emits block " + std::to_string(id) +
             " which is not in block_map");
      }
      if (ins.op == Opcode::Val && !spec.value_site(id)) {
        fail("mock records value site " + std::to_string(id) +
             " which is not mapped");
      }
    }
  }
}

inline TargetSpec parse_manifest(std::string_view text,
                                 const std::string& source,
                                 const std::filesystem::path& base_dir) {
  TargetSpec spec;
  spec.base_dir = base_dir;
  std::string section;
  std::string mock_text;
  std::size_t mock_first_line = 0;
  std::set<std::string> seen_keys;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto fail = [&](std::size_t col, const std::string& what) {
      throw ParseError(source, line_no, col, what);
    };

    if (section == "mock") {
      const auto t = detail::trim(raw);
      if (!(t.starts_with("[") && t.ends_with("]"))) {
        if (mock_first_line == 0) mock_first_line = line_no;
        mock_text += std::string(raw) + "\n";
        continue;
      }
    }

    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto indent = line.find_first_not_of(" \t");
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto col = indent == std::string_view::npos ? 1 : indent + 1;

    if (line.front() == '[') {
      if (line.back() != ']') fail(col, "unterminated section header");
      section = std::string(line.substr(1, line.size() - 2));
      if (section != "block_map" && section != "value_map" &&
          section != "ground_truth" && section != "mock") {
        fail(col + 1, "unknown section [" + section + "]");
      }
      if (section == "mock") {
        if (spec.mock || !mock_text.empty()) fail(col, "duplicate [mock]");
        mock_first_line = 0;
      }
      continue;
    }

    if (section.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(col, "expected key = value");
      const auto key = std::string(detail::trim(line.substr(0, eq)));
      const auto value = detail::trim(line.substr(eq + 1));
      const auto value_col = col + eq + 1;
      if (!seen_keys.insert(key).second) fail(col, "duplicate key '" + key + "'");
      auto ints = [&] {
        std::vector<int> out;
        for (const auto& tok : detail::split_list(value)) {
          int v = 0;
          if (!detail::parse_decimal(tok, v)) {
            fail(value_col, "expected integers for " + key);
          }
          out.push_back(v);
        }
        return out;
      };
      if (key == "id") {
        spec.id = std::string(value);
      } else if (key == "exec") {
        spec.exec = detail::split_list(value);
      } else if (key == "input_mode") {
        if (value == "FileArg") {
          spec.input_mode = InputMode::FileArg;
        } else if (value == "Stdin") {
          spec.input_mode = InputMode::Stdin;
        } else {
          fail(value_col, "input_mode must be FileArg or Stdin");
        }
      } else if (key == "timeout_ms") {
        if (!detail::parse_decimal(value, spec.timeout_ms)) {
          fail(value_col, "timeout_ms must be an integer");
        }
      } else if (key == "crash_signals") {
        spec.crash.crash_signals = ints();
      } else if (key == "crash_exit_codes") {
        spec.crash.crash_exit_codes = ints();
      } else if (key == "seeds") {
        for (const auto& s : detail::split_list(value)) {
          spec.seeds.push_back(base_dir / s);
        }
      } else {
        fail(col, "unknown key '" + key + "'");
      }
      continue;
    }

    if (section == "block_map" || section == "value_map") {
      const auto words = detail::split_list(line);
      BlockSite site;
      if (words.size() < 2 || words.size() > 3 ||
          !detail::parse_decimal(words[0], site.id)) {
        fail(col, "expected <id> <file>:<line> [cond]");
      }
      const auto loc = detail::parse_location(words[1]);
      if (!loc) fail(col, "bad location '" + words[1] + "'");
      site.location = *loc;
      if (words.size() == 3) {
        if (words[2] != "cond") fail(col, "unknown block flag '" + words[2] + "'");
        site.conditional = true;
      }
      (section == "block_map" ? spec.block_map : spec.value_map)
          .push_back(std::move(site));
      continue;
    }

    if (section == "ground_truth") {
      const auto sp = line.find_first_of(" \t");
      const auto loc = detail::parse_location(line.substr(0, sp));
      if (!loc) fail(col, "bad ground-truth location");
      spec.ground_truth.candidates.push_back(*loc);
      spec.ground_truth.notes.emplace_back(
          sp == std::string_view::npos ? std::string_view{}
                                       : detail::trim(line.substr(sp)));
      continue;
    }
  }
  if (!mock_text.empty()) {
    spec.mock = parse_mock(mock_text, source, mock_first_line);
  }
  validate(spec);
  return spec;
}

inline TargetSpec load_manifest(const std::filesystem::path& path) {
  const auto text = read_file(path);
  return parse_manifest(text, path.string(),
                        std::filesystem::absolute(path).parent_path());
}

}  // namespace rcab
