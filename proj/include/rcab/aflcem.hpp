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

// Crash-exploration fuzzing. The queue holds crashing inputs only; an input
// joins it when it crashes and exercises an (edge, hit-class) pair no queued
// crash has. Every execution, crashing or not, goes to the dataset.
//
// Each queue pick walks the entry's deterministic stages once (bitflip, then
// arith), then spends energy * havoc_execs_per_pick havoc executions. Energy
// is uniform and there is no splicing, so a fixed rng seed on an
// execution-count budget replays exactly.

#pragma once

#include <cstdint>
#include <vector>

#include "rcab/augment.hpp"
#include "rcab/coverage.hpp"
#include "rcab/harness.hpp"
#include "rcab/manifest.hpp"
#include "rcab/mutate.hpp"
#include "rcab/rng.hpp"

namespace rcab {

struct QueueEntry {
  Bytes input;
  std::vector<EdgeClass> coverage_signature;
  std::uint32_t energy = 1;
  // Progress through the deterministic stages.
  std::size_t det_step = 0;
};

class AflCemFuzzer {
 public:
  explicit AflCemFuzzer(const TargetSpec& spec, AugmentOptions options = {})
      : spec_(spec), options_(options) {}

  // Appends every execution to `sink`. Throws SeedNotCrashing or BudgetZero.
  void run(const Bytes& seed, Budget budget, std::uint64_t rng_seed,
           Dataset& sink, const SampleObserver& observer = {}) {
    BudgetClock clock(budget);
    if (seed.empty()) throw SeedNotCrashing("empty seed cannot be mutated");
    Executor executor(spec_);
    Recorder rec(executor, clock, sink, observer);
    Rng rng(rng_seed);
    queue_.clear();
    virgin_ = VirginMap();

    const auto first = record_crashing_seed(rec, seed);
    admit(seed, first, /*force=*/true);

    for (std::size_t cursor = 0; !rec.exhausted(); ++cursor) {
      const auto index = cursor % queue_.size();
      fuzz_entry(index, rec, rng);
    }
  }

  const std::vector<QueueEntry>& queue() const { return queue_; }
  const VirginMap& virgin() const { return virgin_; }

 private:
  void fuzz_entry(std::size_t index, Recorder& rec, Rng& rng) {
    const auto len = queue_[index].input.size();
    const auto bitflips = stage_steps(MutationStage::DetBitflip, len);
    const auto det_total = bitflips + stage_steps(MutationStage::DetArith, len);
    while (queue_[index].det_step < det_total && !rec.exhausted()) {
      const auto step = queue_[index].det_step++;
      const auto mutant =
          step < bitflips
              ? mutate(queue_[index].input, rng, MutationStage::DetBitflip, step)
              : mutate(queue_[index].input, rng, MutationStage::DetArith,
                       step - bitflips);
      try_input(mutant, rec);
    }
    const auto havoc = options_.havoc_execs_per_pick * queue_[index].energy;
    for (std::size_t i = 0; i < havoc && !rec.exhausted(); ++i) {
      // Copy: admission may reallocate the queue.
      const Bytes parent = queue_[index].input;
      try_input(mutate(parent, rng, MutationStage::Havoc, 0,
                       options_.max_input_len),
                rec);
    }
  }

  void try_input(const Bytes& input, Recorder& rec) {
    const auto s = rec.run(input);
    if (s && s->verdict.is_crash()) admit(input, *s, false);
  }

  void admit(const Bytes& input, const Sample& s, bool force) {
    auto sig = CoverageMap::from_trace(s.trace).signature();
    if (!virgin_.merge(sig) && !force) return;
    queue_.push_back(QueueEntry{input, std::move(sig), 1, 0});
  }

  const TargetSpec& spec_;
  AugmentOptions options_;
  std::vector<QueueEntry> queue_;
  VirginMap virgin_;
};

inline Dataset& run_aflcem(const TargetSpec& spec, const Bytes& seed,
                           Budget budget, std::uint64_t rng_seed, Dataset& sink,
                           const AugmentOptions& options = {},
                           const SampleObserver& observer = {}) {
  AflCemFuzzer fuzzer(spec, options);
  fuzzer.run(seed, budget, rng_seed, sink, observer);
  return sink;
}

}  // namespace rcab
