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

// Domain types shared by every stage of the pipeline: source locations,
// execution traces, samples and datasets produced by augmentation, and the
// rankings produced by extraction.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <csignal>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcab/error.hpp"

namespace rcab {

using Bytes = std::vector<std::uint8_t>;

// Budget-clock reading: milliseconds for wall-clock campaigns, execution
// index for execution-count campaigns.
using Tick = std::uint64_t;

// A source coordinate. Root-cause ground truth is compared at line
// granularity.
struct Location {
  std::string file;
  std::uint32_t line = 0;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;

  std::string to_string() const { return file + ":" + std::to_string(line); }
};

inline Location make_location(std::string file, std::uint32_t line) {
  if (file.empty()) throw ValidationError("location file must be non-empty");
  if (line < 1) throw ValidationError("location line must be >= 1");
  return Location{std::move(file), line};
}

struct BlockSite {
  std::uint32_t id = 0;
  Location location;
  // Marks sites whose execution depends on a branch outcome.
  bool conditional = false;

  friend bool operator==(const BlockSite&, const BlockSite&) = default;
};

enum class EventKind : std::uint8_t { Block, Value };

struct TraceEvent {
  EventKind kind = EventKind::Block;
  std::uint32_t id = 0;
  std::int64_t value = 0;  // Value events only.

  static TraceEvent block(std::uint32_t id) {
    return {EventKind::Block, id, 0};
  }
  static TraceEvent val(std::uint32_t site, std::int64_t v) {
    return {EventKind::Value, site, v};
  }

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class TerminalKind : std::uint8_t { Exit, Signal };

struct Terminal {
  TerminalKind kind = TerminalKind::Exit;
  int code = 0;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

// Ordered observations of one execution. Timed-out and broken runs have no
// terminal.
struct Trace {
  std::vector<TraceEvent> events;
  std::optional<Terminal> terminal;

  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class VerdictKind : std::uint8_t { Crash, NonCrash, Timeout, HarnessError };

struct Verdict {
  VerdictKind kind = VerdictKind::HarnessError;
  std::optional<int> signal;
  std::optional<int> exit_code;

  static Verdict crash_signal(int sig) {
    return {VerdictKind::Crash, sig, std::nullopt};
  }
  static Verdict crash_exit(int code) {
    return {VerdictKind::Crash, std::nullopt, code};
  }
  static Verdict non_crash(int code) {
    return {VerdictKind::NonCrash, std::nullopt, code};
  }
  static Verdict timeout() { return {VerdictKind::Timeout, {}, {}}; }
  static Verdict harness_error() { return {VerdictKind::HarnessError, {}, {}}; }

  bool is_crash() const { return kind == VerdictKind::Crash; }
  // Timeouts and harness failures are kept for audit but never counted.
  bool countable() const {
    return kind == VerdictKind::Crash || kind == VerdictKind::NonCrash;
  }
  bool well_formed() const {
    switch (kind) {
      case VerdictKind::Crash:
        return signal.has_value() != exit_code.has_value();
      case VerdictKind::NonCrash:
        return exit_code.has_value() && !signal.has_value();
      default:
        return !signal && !exit_code;
    }
  }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Crash: return "crash";
    case VerdictKind::NonCrash: return "noncrash";
    case VerdictKind::Timeout: return "timeout";
    case VerdictKind::HarnessError: return "harness_error";
  }
  return "?";
}

// Whether the verdict agrees with the trace's terminal event.
inline bool verdict_matches_trace(const Verdict& v, const Trace& t) {
  if (!v.countable()) return true;
  if (!t.terminal) return false;
  if (v.signal) {
    return t.terminal->kind == TerminalKind::Signal &&
           t.terminal->code == *v.signal;
  }
  return t.terminal->kind == TerminalKind::Exit &&
         t.terminal->code == v.exit_code.value_or(-1);
}

// Which terminations count as crashes for a target.
struct CrashPolicy {
  std::vector<int> crash_signals{SIGSEGV, SIGABRT, SIGBUS, SIGFPE};
  std::vector<int> crash_exit_codes;

  Verdict classify(const Terminal& t) const {
    auto has = [](const std::vector<int>& v, int x) {
      return std::find(v.begin(), v.end(), x) != v.end();
    };
    if (t.kind == TerminalKind::Signal) {
      // Any other signal (SIGTERM, SIGKILL from outside) is a harness error.
      return has(crash_signals, t.code) ? Verdict::crash_signal(t.code)
                                        : Verdict::harness_error();
    }
    return has(crash_exit_codes, t.code) ? Verdict::crash_exit(t.code)
                                         : Verdict::non_crash(t.code);
  }
};

struct Sample {
  Bytes input;
  Trace trace;
  Verdict verdict;
  Tick born_at = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Append-only collection of samples from one augmentation campaign.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string target_id, std::string augmenter_id,
          std::uint64_t rng_seed)
      : target_id_(std::move(target_id)),
        augmenter_id_(std::move(augmenter_id)),
        rng_seed_(rng_seed) {}

  const std::string& target_id() const { return target_id_; }
  const std::string& augmenter_id() const { return augmenter_id_; }
  std::uint64_t rng_seed() const { return rng_seed_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  void append(Sample s) {
    if (!samples_.empty() && s.born_at < samples_.back().born_at) {
      throw ValidationError("dataset born_at must be non-decreasing");
    }
    samples_.push_back(std::move(s));
  }

  // Copy of every sample born at or before `t`.
  Dataset snapshot(Tick t) const {
    Dataset out(target_id_, augmenter_id_, rng_seed_);
    auto end = std::upper_bound(
        samples_.begin(), samples_.end(), t,
        [](Tick v, const Sample& s) { return v < s.born_at; });
    out.samples_.assign(samples_.begin(), end);
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::string target_id_;
  std::string augmenter_id_;
  std::uint64_t rng_seed_ = 0;
  std::vector<Sample> samples_;
};

struct GroundTruth {
  std::vector<Location> candidates;
  std::vector<std::string> notes;  // Parallel to candidates.

  bool contains(const Location& loc) const {
    return std::find(candidates.begin(), candidates.end(), loc) !=
           candidates.end();
  }
};

struct RankEntry {
  Location location;
  double score = 0.0;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

inline constexpr std::size_t kDefaultRankCap = 200;

struct Ranking {
  std::vector<RankEntry> entries;
  std::size_t cap = kDefaultRankCap;

  bool well_formed() const {
    if (cap == 0 || entries.size() > cap) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!std::isfinite(entries[i].score)) return false;
      if (i > 0 && entries[i - 1].score < entries[i].score) return false;
    }
    return true;
  }
};

// Sorts by score descending with ties in (file, line) order, then truncates
// to `cap`.
inline Ranking make_ranking(std::vector<RankEntry> entries, std::size_t cap) {
  if (cap == 0) throw ValidationError("ranking cap must be positive");
  std::sort(entries.begin(), entries.end(),
            [](const RankEntry& a, const RankEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.location < b.location;
            });
  if (entries.size() > cap) entries.resize(cap);
  return Ranking{std::move(entries), cap};
}

// 1-based rank of the best-scored ground-truth location, placing it last in
// its tie group. nullopt when no candidate is listed.
inline std::optional<std::size_t> rank_of_ground_truth(const Ranking& ranking,
                                                       const GroundTruth& gt) {
  std::optional<double> best;
  for (const auto& e : ranking.entries) {
    if (gt.contains(e.location) && (!best || e.score > *best)) best = e.score;
  }
  if (!best) return std::nullopt;
  std::size_t rank = 0;
  for (const auto& e : ranking.entries) {
    if (e.score >= *best) ++rank;
  }
  return rank;
}

struct Balance {
  std::size_t n_crash = 0;
  std::size_t n_noncrash = 0;
  double ratio = 0.0;

  friend bool operator==(const Balance&, const Balance&) = default;
};

inline Balance dataset_balance(const Dataset& d) {
  Balance b;
  for (const auto& s : d.samples()) {
    if (s.verdict.kind == VerdictKind::Crash) ++b.n_crash;
    if (s.verdict.kind == VerdictKind::NonCrash) ++b.n_noncrash;
  }
  b.ratio = static_cast<double>(b.n_crash) /
            static_cast<double>(std::max<std::size_t>(1, b.n_noncrash));
  return b;
}

}  // namespace rcab
