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

// Neighbourhood exploration around one crashing path, in the spirit of
// VulnLoc's ConcFuzz (Shen et al.; see that publication for the original
// algorithm). This is a stand-in built from two steps:
//
//  1. Sensitivity: every seed byte is replaced K times by other random
//     values. A byte is influential for a branch point when a probe changes
//     whether that point is reached or the value observed just before it.
//  2. Concentration: rounds visit the branch points in trace order and, for
//     each, mutate only bytes influential for it, preferring bytes that no
//     earlier point depends on so the path up to the point tends to survive.
//
// Every probe and mutant execution is recorded. Mutants are derived from the
// seed only.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "rcab/augment.hpp"
#include "rcab/harness.hpp"
#include "rcab/manifest.hpp"
#include "rcab/rng.hpp"

namespace rcab {

struct BranchPoint {
  std::size_t trace_index = 0;
  BlockSite site;
  // Value of the nearest preceding V event, if any.
  std::optional<std::int64_t> observed_value;
  // Which occurrence of the block this is (0-based).
  std::size_t occurrence = 0;

  friend bool operator==(const BranchPoint&, const BranchPoint&) = default;
};

// Influential byte indices per branch point, sorted ascending.
using SensitivityMap = std::vector<std::vector<std::size_t>>;

inline std::vector<BranchPoint> branch_sequence(const Trace& crashing_trace,
                                                const TargetSpec& spec) {
  if (!crashing_trace.terminal ||
      !spec.crash.classify(*crashing_trace.terminal).is_crash()) {
    throw NonCrashTrace("branch_sequence needs a crashing trace");
  }
  std::vector<BranchPoint> points;
  std::optional<std::int64_t> last_value;
  std::vector<std::pair<std::uint32_t, std::size_t>> seen;  // id -> count
  for (std::size_t i = 0; i < crashing_trace.events.size(); ++i) {
    const auto& e = crashing_trace.events[i];
    if (e.kind == EventKind::Value) {
      last_value = e.value;
      continue;
    }
    auto it = std::find_if(seen.begin(), seen.end(),
                           [&](const auto& p) { return p.first == e.id; });
    if (it == seen.end()) it = seen.insert(seen.end(), {e.id, 0});
    const auto occurrence = it->second++;
    const auto* site = spec.block_site(e.id);
    if (site == nullptr || !site->conditional) continue;
    points.push_back(BranchPoint{i, *site, last_value, occurrence});
  }
  return points;
}

namespace detail {

struct PointOutcome {
  bool present = false;
  std::optional<std::int64_t> observed_value;

  friend bool operator==(const PointOutcome&, const PointOutcome&) = default;
};

inline PointOutcome outcome_of(const BranchPoint& p, const Trace& t) {
  std::optional<std::int64_t> last_value;
  std::size_t seen = 0;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::Value) {
      last_value = e.value;
    } else if (e.id == p.site.id && seen++ == p.occurrence) {
      return {true, last_value};
    }
  }
  return {};
}

inline std::uint8_t different_byte(std::uint8_t original, Rng& rng) {
  return static_cast<std::uint8_t>(original + 1 + rng.below(255));
}

}  // namespace detail

// Probes run through `rec`, so they are recorded and budgeted; analysis stops
// early when the budget runs out.
inline SensitivityMap sensitivity_map(Recorder& rec, const Bytes& input,
                                      const std::vector<BranchPoint>& points,
                                      std::size_t probes_per_byte, Rng& rng) {
  SensitivityMap map(points.size());
  if (probes_per_byte == 0 || points.empty()) return map;
  std::vector<detail::PointOutcome> baseline;
  const auto base = rec.dry_run(input);
  for (const auto& p : points) baseline.push_back(detail::outcome_of(p, base.trace));

  for (std::size_t i = 0; i < input.size(); ++i) {
    std::vector<bool> hit(points.size(), false);
    for (std::size_t k = 0; k < probes_per_byte; ++k) {
      Bytes probe = input;
      probe[i] = detail::different_byte(input[i], rng);
      const auto s = rec.run(probe);
      if (!s) break;
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (detail::outcome_of(points[j], s->trace) != baseline[j]) hit[j] = true;
      }
    }
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (hit[j]) map[j].push_back(i);
    }
    if (rec.exhausted()) break;
  }
  return map;
}

class ConcFuzzer {
 public:
  explicit ConcFuzzer(const TargetSpec& spec, AugmentOptions options = {})
      : spec_(spec), options_(options) {}

  void run(const Bytes& seed, Budget budget, std::uint64_t rng_seed,
           Dataset& sink, const SampleObserver& observer = {}) {
    BudgetClock clock(budget);
    Executor executor(spec_);
    Recorder rec(executor, clock, sink, observer);
    Rng rng(rng_seed);

    const auto first = record_crashing_seed(rec, seed);
    points_ = branch_sequence(first.trace, spec_);
    sensitivity_ =
        sensitivity_map(rec, seed, points_, options_.probes_per_byte, rng);
    if (seed.empty()) return;

    targets_ = mutation_targets(seed.size());
    while (!rec.exhausted()) {
      for (const auto& bytes : targets_) {
        for (std::size_t r = 0; r < options_.execs_per_point_round; ++r) {
          if (!rec.run(mutant(seed, bytes, rng))) return;
        }
      }
    }
  }

  const std::vector<BranchPoint>& points() const { return points_; }
  const SensitivityMap& sensitivity() const { return sensitivity_; }
  // Byte sets mutated per round, one per active branch point.
  const std::vector<std::vector<std::size_t>>& targets() const {
    return targets_;
  }

 private:
  std::vector<std::vector<std::size_t>> mutation_targets(std::size_t len) const {
    std::vector<std::vector<std::size_t>> out;
    std::set<std::size_t> earlier;
    for (const auto& bytes : sensitivity_) {
      std::vector<std::size_t> own;
      for (auto b : bytes) {
        if (!earlier.count(b)) own.push_back(b);
      }
      if (!bytes.empty()) out.push_back(own.empty() ? bytes : own);
      earlier.insert(bytes.begin(), bytes.end());
    }
    if (out.empty()) {
      std::vector<std::size_t> all(len);
      for (std::size_t i = 0; i < len; ++i) all[i] = i;
      out.push_back(std::move(all));
    }
    return out;
  }

  static Bytes mutant(const Bytes& seed, const std::vector<std::size_t>& bytes,
                      Rng& rng) {
    Bytes out = seed;
    const auto edits = 1 + rng.below(std::min<std::size_t>(bytes.size(), 4));
    for (std::size_t e = 0; e < edits; ++e) {
      auto& b = out[bytes[rng.below(bytes.size())]];
      if (rng.coin()) {
        b = detail::different_byte(b, rng);
      } else {
        const auto delta = static_cast<std::uint8_t>(1 + rng.below(8));
        b = static_cast<std::uint8_t>(rng.coin() ? b + delta : b - delta);
      }
    }
    return out;
  }

  const TargetSpec& spec_;
  AugmentOptions options_;
  std::vector<BranchPoint> points_;
  SensitivityMap sensitivity_;
  std::vector<std::vector<std::size_t>> targets_;
};

inline Dataset& run_concfuzz(const TargetSpec& spec, const Bytes& seed,
                             Budget budget, std::uint64_t rng_seed,
                             Dataset& sink, const AugmentOptions& options = {},
                             const SampleObserver& observer = {}) {
  ConcFuzzer fuzzer(spec, options);
  fuzzer.run(seed, budget, rng_seed, sink, observer);
  return sink;
}

}  // namespace rcab
