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

// Plumbing shared by the augmenters: budget accounting and sample recording.

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>

#include "rcab/error.hpp"
#include "rcab/harness.hpp"
#include "rcab/model.hpp"
#include "rcab/schedule.hpp"

namespace rcab {

inline constexpr std::size_t kDefaultMaxInputLen = std::size_t{1} << 20;

struct AugmentOptions {
  std::size_t max_input_len = kDefaultMaxInputLen;
  // aflcem: havoc executions per queue pick (uniform energy).
  std::size_t havoc_execs_per_pick = 256;
  // concfuzz: random probes per input byte during sensitivity analysis.
  std::size_t probes_per_byte = 8;
  // concfuzz: executions spent on each branch point per round.
  std::size_t execs_per_point_round = 16;
};

// Called after every append; lets the orchestrator cut snapshots while the
// campaign keeps running.
using SampleObserver = std::function<void(const Dataset&)>;

// Measures a campaign against its budget. Execution-count budgets use a
// virtual clock (born_at = 1-based execution index) so campaigns replay
// exactly; wall budgets stamp elapsed milliseconds.
class BudgetClock {
 public:
  explicit BudgetClock(Budget budget)
      : budget_(budget), start_(std::chrono::steady_clock::now()) {
    if (budget.amount == 0) throw BudgetZero("augmentation budget must be > 0");
  }

  const Budget& budget() const { return budget_; }
  std::uint64_t executions() const { return executions_; }

  Tick now() const {
    if (budget_.kind == BudgetKind::Execs) return executions_;
    return static_cast<Tick>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start_)
            .count());
  }

  bool exhausted() const { return now() >= budget_.amount; }

  // Accounts for one execution and returns its born_at stamp.
  Tick tick() {
    ++executions_;
    return now();
  }

 private:
  Budget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t executions_ = 0;
};

// Runs inputs through an executor and appends every result to the sink.
class Recorder {
 public:
  Recorder(Executor& executor, BudgetClock& clock, Dataset& sink,
           SampleObserver observer = {})
      : executor_(executor),
        clock_(clock),
        sink_(sink),
        observer_(std::move(observer)) {}

  bool exhausted() const { return clock_.exhausted(); }

  // nullopt when the budget is already spent.
  std::optional<Sample> run(const Bytes& input) {
    if (clock_.exhausted()) return std::nullopt;
    return record(input);
  }

  // Runs without checking the budget; used for the campaign's seed.
  Sample record(const Bytes& input) {
    Sample s = executor_.run(input);
    s.born_at = clock_.tick();
    sink_.append(s);
    if (observer_) observer_(sink_);
    return s;
  }

  // Runs without recording; used to reject a non-crashing seed up front.
  Sample dry_run(const Bytes& input) { return executor_.run(input); }

  const TargetSpec& spec() const { return executor_.spec(); }
  BudgetClock& clock() { return clock_; }

 private:
  Executor& executor_;
  BudgetClock& clock_;
  Dataset& sink_;
  SampleObserver observer_;
};

// Checks the seed and records it as the first sample of the campaign.
inline Sample record_crashing_seed(Recorder& rec, const Bytes& seed) {
  if (!rec.dry_run(seed).verdict.is_crash()) {
    throw SeedNotCrashing("seed does not crash target '" + rec.spec().id + "'");
  }
  return rec.record(seed);
}

}  // namespace rcab
