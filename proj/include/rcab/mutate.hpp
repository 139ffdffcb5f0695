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

// Byte-level mutation stages of the crash-exploration fuzzer.
//
// Deterministic stages are indexed by a step number so a campaign can walk
// them in order:
//   DetBitflip  step s flips bit (s % 8) of byte s / 8, most significant
//               bit first; 8 * len steps.
//   DetArith    step s adds +1, -1, +2, -2, ..., +35, -35 (mod 256) to byte
//               s / 70; 70 * len steps.
// Havoc stacks 1, 2, 4, ..., 64 random operations drawn from: flip a bit,
// set a byte, add, subtract, delete a block, duplicate a block.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "rcab/augment.hpp"
#include "rcab/error.hpp"
#include "rcab/model.hpp"
#include "rcab/rng.hpp"

namespace rcab {

enum class MutationStage : std::uint8_t { DetBitflip, DetArith, Havoc };

inline constexpr int kArithMax = 35;
inline constexpr std::size_t kHavocMaxStackLog2 = 6;
inline constexpr std::size_t kHavocBlockMax = 32;

inline std::size_t stage_steps(MutationStage stage, std::size_t len) {
  switch (stage) {
    case MutationStage::DetBitflip: return 8 * len;
    case MutationStage::DetArith: return 2 * kArithMax * len;
    case MutationStage::Havoc: return 0;
  }
  return 0;
}

// Signed delta for DetArith step s: +1, -1, +2, -2, ...
inline int arith_delta(std::size_t step) {
  const int magnitude = static_cast<int>((step % (2 * kArithMax)) / 2) + 1;
  return step % 2 == 0 ? magnitude : -magnitude;
}

namespace detail {

inline void havoc_once(Bytes& b, Rng& rng, std::size_t max_len) {
  switch (rng.below(6)) {
    case 0:
      b[rng.below(b.size())] ^= static_cast<std::uint8_t>(0x80u >> rng.below(8));
      break;
    case 1:
      b[rng.below(b.size())] = static_cast<std::uint8_t>(rng.below(256));
      break;
    case 2:
      b[rng.below(b.size())] += static_cast<std::uint8_t>(1 + rng.below(kArithMax));
      break;
    case 3:
      b[rng.below(b.size())] -= static_cast<std::uint8_t>(1 + rng.below(kArithMax));
      break;
    case 4: {
      if (b.size() < 2) break;
      const auto len = 1 + rng.below(std::min(b.size() - 1, kHavocBlockMax));
      const auto from = rng.below(b.size() - len + 1);
      b.erase(b.begin() + static_cast<std::ptrdiff_t>(from),
              b.begin() + static_cast<std::ptrdiff_t>(from + len));
      break;
    }
    default: {
      const auto len = 1 + rng.below(std::min(b.size(), kHavocBlockMax));
      if (b.size() + len > max_len) break;
      const auto from = rng.below(b.size() - len + 1);
      const auto to = rng.below(b.size() + 1);
      const Bytes chunk(b.begin() + static_cast<std::ptrdiff_t>(from),
                        b.begin() + static_cast<std::ptrdiff_t>(from + len));
      b.insert(b.begin() + static_cast<std::ptrdiff_t>(to), chunk.begin(),
               chunk.end());
      break;
    }
  }
}

}  // namespace detail

// `step` selects the deterministic mutation and is ignored by Havoc, which
// draws from `rng` instead. Output is never empty and never longer than
// max(input.size(), max_len).
inline Bytes mutate(const Bytes& input, Rng& rng, MutationStage stage,
                    std::size_t step = 0,
                    std::size_t max_len = kDefaultMaxInputLen) {
  if (input.empty()) throw ValidationError("cannot mutate an empty input");
  Bytes out = input;
  switch (stage) {
    case MutationStage::DetBitflip: {
      const auto s = step % stage_steps(stage, input.size());
      out[s / 8] ^= static_cast<std::uint8_t>(0x80u >> (s % 8));
      break;
    }
    case MutationStage::DetArith: {
      const auto s = step % stage_steps(stage, input.size());
      out[s / (2 * kArithMax)] += static_cast<std::uint8_t>(arith_delta(s));
      break;
    }
    case MutationStage::Havoc: {
      const auto stack = std::size_t{1} << rng.below(kHavocMaxStackLog2 + 1);
      for (std::size_t i = 0; i < stack; ++i) {
        detail::havoc_once(out, rng, max_len);
      }
      break;
    }
  }
  return out;
}

}  // namespace rcab
