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

// Spectrum-based extraction. Each source location gets executed/not-executed
// counts split by crashing and non-crashing samples and is scored with the
// Ochiai coefficient. VulnLoc's own suspiciousness formula (Shen et al.)
// differs; Ochiai is used here as a bounded, well-studied stand-in.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <vector>

#include "rcab/error.hpp"
#include "rcab/manifest.hpp"
#include "rcab/model.hpp"

namespace rcab {

struct Spectrum {
  std::size_t a_ef = 0;  // executed, crash
  std::size_t a_ep = 0;  // executed, non-crash
  std::size_t a_nf = 0;  // not executed, crash
  std::size_t a_np = 0;  // not executed, non-crash

  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

struct SpectrumCounts {
  std::map<Location, Spectrum> per_location;
  std::size_t n_crash = 0;
  std::size_t n_noncrash = 0;
};

inline void require_both_classes(const Dataset& d) {
  const auto b = dataset_balance(d);
  if (b.n_crash == 0 || b.n_noncrash == 0) {
    throw DegenerateDataset("dataset needs crashing and non-crashing samples (" +
                            std::to_string(b.n_crash) + " crash, " +
                            std::to_string(b.n_noncrash) + " non-crash)");
  }
}

// A location counts as executed in a sample when any of its blocks appears
// in the trace at least once.
inline SpectrumCounts spectrum_counts(const Dataset& d, const TargetSpec& spec) {
  require_both_classes(d);
  std::vector<Location> locations;
  std::unordered_map<std::uint32_t, std::size_t> block_to_loc;
  {
    std::map<Location, std::size_t> index;
    for (const auto& b : spec.block_map) {
      auto [it, fresh] = index.emplace(b.location, locations.size());
      if (fresh) locations.push_back(b.location);
      block_to_loc[b.id] = it->second;
    }
  }
  std::vector<Spectrum> counts(locations.size());
  std::vector<std::size_t> stamp(locations.size(), 0);
  SpectrumCounts out;
  std::size_t sample_no = 0;
  for (const auto& s : d.samples()) {
    if (!s.verdict.countable()) continue;
    ++sample_no;
    const bool crash = s.verdict.is_crash();
    (crash ? out.n_crash : out.n_noncrash)++;
    for (const auto& e : s.trace.events) {
      if (e.kind != EventKind::Block) continue;
      const auto it = block_to_loc.find(e.id);
      if (it == block_to_loc.end() || stamp[it->second] == sample_no) continue;
      stamp[it->second] = sample_no;
      (crash ? counts[it->second].a_ef : counts[it->second].a_ep)++;
    }
  }
  for (std::size_t i = 0; i < locations.size(); ++i) {
    auto& c = counts[i];
    c.a_nf = out.n_crash - c.a_ef;
    c.a_np = out.n_noncrash - c.a_ep;
    out.per_location.emplace(locations[i], c);
  }
  return out;
}

// Ochiai: a_ef / sqrt((a_ef + a_nf) * (a_ef + a_ep)), 0 when a_ef = 0.
inline double ochiai(const Spectrum& c) {
  if (c.a_ef == 0) return 0.0;
  const double crash_total = static_cast<double>(c.a_ef + c.a_nf);
  const double executed = static_cast<double>(c.a_ef + c.a_ep);
  return static_cast<double>(c.a_ef) / std::sqrt(crash_total * executed);
}

inline Ranking vulnloc_rank(const Dataset& d, const TargetSpec& spec,
                            std::size_t cap = kDefaultRankCap) {
  const auto counts = spectrum_counts(d, spec);
  std::vector<RankEntry> entries;
  entries.reserve(counts.per_location.size());
  for (const auto& [loc, c] : counts.per_location) {
    entries.push_back({loc, ochiai(c)});
  }
  return make_ranking(std::move(entries), cap);
}

}  // namespace rcab
