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

// On-disk dataset layout (one directory per trial):
//
//   dataset.meta            target_id / augmenter_id / rng_seed, key=value
//   samples.idx             <seq> <born_at> <verdict> <input-file> <trace-file>
//   inputs/<seq>.bin        raw input bytes
//   traces/<seq>.trace      trace in the RCAB1 protocol
//
// Verdict tokens: crash:s<signal>, crash:x<exit>, noncrash:<exit>, timeout,
// harness_error.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "rcab/error.hpp"
#include "rcab/model.hpp"
#include "rcab/trace_format.hpp"

namespace rcab {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline Bytes read_bytes(const std::filesystem::path& path) {
  const auto s = read_file(path);
  return Bytes(s.begin(), s.end());
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path.string());
}

inline void write_bytes(const std::filesystem::path& path, const Bytes& b) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(b.data()),
                                    b.size()));
}

inline std::string verdict_token(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Crash:
      return v.signal ? "crash:s" + std::to_string(*v.signal)
                      : "crash:x" + std::to_string(v.exit_code.value_or(0));
    case VerdictKind::NonCrash:
      return "noncrash:" + std::to_string(v.exit_code.value_or(0));
    case VerdictKind::Timeout:
      return "timeout";
    case VerdictKind::HarnessError:
      return "harness_error";
  }
  return "harness_error";
}

inline Verdict parse_verdict_token(std::string_view tok) {
  int code = 0;
  if (tok == "timeout") return Verdict::timeout();
  if (tok == "harness_error") return Verdict::harness_error();
  if (tok.starts_with("crash:s") && detail::parse_decimal(tok.substr(7), code)) {
    return Verdict::crash_signal(code);
  }
  if (tok.starts_with("crash:x") && detail::parse_decimal(tok.substr(7), code)) {
    return Verdict::crash_exit(code);
  }
  if (tok.starts_with("noncrash:") &&
      detail::parse_decimal(tok.substr(9), code)) {
    return Verdict::non_crash(code);
  }
  throw ValidationError("unknown verdict token '" + std::string(tok) + "'");
}

inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "inputs");
  fs::create_directories(dir / "traces");
  write_file(dir / "dataset.meta",
             "target_id=" + d.target_id() + "\naugmenter_id=" +
                 d.augmenter_id() + "\nrng_seed=" +
                 std::to_string(d.rng_seed()) + "\n");
  std::string index;
  char name[32];
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& s = d.samples()[i];
    std::snprintf(name, sizeof name, "%06zu", i);
    const std::string input_rel = std::string("inputs/") + name + ".bin";
    const std::string trace_rel = std::string("traces/") + name + ".trace";
    write_bytes(dir / input_rel, s.input);
    write_file(dir / trace_rel, serialize_trace(s.trace));
    index += std::to_string(i) + ' ' + std::to_string(s.born_at) + ' ' +
             verdict_token(s.verdict) + ' ' + input_rel + ' ' + trace_rel +
             '\n';
  }
  write_file(dir / "samples.idx", index);
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
  std::string target_id, augmenter_id;
  std::uint64_t rng_seed = 0;
  {
    std::istringstream meta(read_file(dir / "dataset.meta"));
    std::string line;
    while (std::getline(meta, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = line.substr(0, eq);
      const auto value = line.substr(eq + 1);
      if (key == "target_id") target_id = value;
      if (key == "augmenter_id") augmenter_id = value;
      if (key == "rng_seed" && !detail::parse_decimal(value, rng_seed)) {
        throw ParseError((dir / "dataset.meta").string(), 0, 0,
                         "bad rng_seed");
      }
    }
  }
  Dataset d(target_id, augmenter_id, rng_seed);
  const auto idx_path = (dir / "samples.idx").string();
  std::istringstream idx(read_file(dir / "samples.idx"));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(idx, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t seq = 0;
    Tick born_at = 0;
    std::string verdict, input_rel, trace_rel;
    if (!(fields >> seq >> born_at >> verdict >> input_rel >> trace_rel)) {
      throw ParseError(idx_path, line_no, 0, "expected 5 fields");
    }
    if (seq != d.size()) {
      throw ParseError(idx_path, line_no, 1, "sequence numbers out of order");
    }
    Sample s;
    s.born_at = born_at;
    s.verdict = parse_verdict_token(verdict);
    s.input = read_bytes(dir / input_rel);
    s.trace = parse_trace(read_file(dir / trace_rel), (dir / trace_rel).string(),
                          TerminalPolicy::Optional);
    d.append(std::move(s));
  }
  return d;
}

}  // namespace rcab
