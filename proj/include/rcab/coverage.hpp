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

// AFL-style edge coverage over block traces. Edges hash into 2^16 buckets;
// hit counts are bucketed into eight classes before novelty checks.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rcab/model.hpp"

namespace rcab {

inline constexpr std::size_t kCoverageMapSize = std::size_t{1} << 16;

inline std::uint16_t block_hash(std::uint32_t id) {
  std::uint32_t x = id + 0x9E3779B9u;
  x ^= x >> 16;
  x *= 0x85EBCA6Bu;
  x ^= x >> 13;
  return static_cast<std::uint16_t>(x ^ (x >> 16));
}

inline std::uint16_t edge_bucket(std::uint16_t prev, std::uint16_t cur) {
  const auto rot = static_cast<std::uint16_t>((cur << 1) | (cur >> 15));
  return static_cast<std::uint16_t>(prev ^ rot);
}

// 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+  ->  1..8. Zero stays zero.
inline std::uint8_t count_class(std::uint32_t hits) {
  if (hits == 0) return 0;
  if (hits <= 3) return static_cast<std::uint8_t>(hits);
  if (hits <= 7) return 4;
  if (hits <= 15) return 5;
  if (hits <= 31) return 6;
  if (hits <= 127) return 7;
  return 8;
}

struct EdgeClass {
  std::uint16_t edge = 0;
  std::uint8_t cls = 0;

  friend bool operator==(const EdgeClass&, const EdgeClass&) = default;
  friend auto operator<=>(const EdgeClass&, const EdgeClass&) = default;
};

// Hit counters of one execution. Stored sparsely (sorted by bucket) since
// traces touch a handful of the 2^16 buckets.
class CoverageMap {
 public:
  static CoverageMap from_trace(const Trace& trace) {
    std::vector<std::uint16_t> edges;
    std::uint16_t prev = 0;
    for (const auto& e : trace.events) {
      if (e.kind != EventKind::Block) continue;
      const auto cur = block_hash(e.id);
      edges.push_back(edge_bucket(prev, cur));
      prev = static_cast<std::uint16_t>(cur >> 1);
    }
    std::sort(edges.begin(), edges.end());
    CoverageMap m;
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t j = i;
      while (j < edges.size() && edges[j] == edges[i]) ++j;
      m.hits_.emplace_back(edges[i], static_cast<std::uint32_t>(j - i));
      i = j;
    }
    return m;
  }

  std::uint32_t hits(std::uint16_t bucket) const {
    auto it = std::lower_bound(
        hits_.begin(), hits_.end(), bucket,
        [](const auto& p, std::uint16_t b) { return p.first < b; });
    return it != hits_.end() && it->first == bucket ? it->second : 0;
  }

  std::vector<EdgeClass> signature() const {
    std::vector<EdgeClass> sig;
    sig.reserve(hits_.size());
    for (const auto& [edge, n] : hits_) sig.push_back({edge, count_class(n)});
    return sig;
  }

 private:
  std::vector<std::pair<std::uint16_t, std::uint32_t>> hits_;
};

// Union of (edge, class) pairs seen so far, one bit per class per bucket.
class VirginMap {
 public:
  VirginMap() : seen_(kCoverageMapSize, 0) {}

  bool has_new(const std::vector<EdgeClass>& sig) const {
    return std::any_of(sig.begin(), sig.end(), [&](const EdgeClass& ec) {
      return (seen_[ec.edge] & bit(ec.cls)) == 0;
    });
  }

  // Returns whether anything new was added.
  bool merge(const std::vector<EdgeClass>& sig) {
    bool fresh = false;
    for (const auto& ec : sig) {
      if ((seen_[ec.edge] & bit(ec.cls)) == 0) {
        seen_[ec.edge] |= bit(ec.cls);
        fresh = true;
      }
    }
    return fresh;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : seen_) n += static_cast<std::size_t>(__builtin_popcount(b));
    return n;
  }

 private:
  static std::uint8_t bit(std::uint8_t cls) {
    return static_cast<std::uint8_t>(1u << (cls - 1));
  }

  std::vector<std::uint8_t> seen_;
};

}  // namespace rcab
