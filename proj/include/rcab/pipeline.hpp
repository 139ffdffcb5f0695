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

// Method names, dispatch and CSV output shared by the CLI and the bench.

#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "rcab/aflcem.hpp"
#include "rcab/aurora.hpp"
#include "rcab/concfuzz.hpp"
#include "rcab/dataset_io.hpp"
#include "rcab/vulnloc.hpp"

namespace rcab {

enum class AugmenterKind { AflCem, ConcFuzz };
enum class ExtractorKind { VulnLoc, Aurora };

inline const char* to_string(AugmenterKind k) {
  return k == AugmenterKind::AflCem ? "aflcem" : "concfuzz";
}

inline const char* to_string(ExtractorKind k) {
  return k == ExtractorKind::VulnLoc ? "vulnloc" : "aurora";
}

inline AugmenterKind parse_augmenter(std::string_view s) {
  if (s == "aflcem") return AugmenterKind::AflCem;
  if (s == "concfuzz") return AugmenterKind::ConcFuzz;
  throw ValidationError("unknown augmenter '" + std::string(s) +
                        "' (expected aflcem or concfuzz)");
}

inline ExtractorKind parse_extractor(std::string_view s) {
  if (s == "vulnloc") return ExtractorKind::VulnLoc;
  if (s == "aurora") return ExtractorKind::Aurora;
  throw ValidationError("unknown extractor '" + std::string(s) +
                        "' (expected vulnloc or aurora)");
}

inline void augment(AugmenterKind kind, const TargetSpec& spec, const Bytes& seed,
                    Budget budget, std::uint64_t rng_seed, Dataset& sink,
                    const AugmentOptions& options = {},
                    const SampleObserver& observer = {}) {
  if (kind == AugmenterKind::AflCem) {
    run_aflcem(spec, seed, budget, rng_seed, sink, options, observer);
  } else {
    run_concfuzz(spec, seed, budget, rng_seed, sink, options, observer);
  }
}

struct Extraction {
  Ranking ranking;
  std::vector<PredicateScore> predicates;  // aurora only
};

inline Extraction extract(ExtractorKind kind, const Dataset& d,
                          const TargetSpec& spec, std::size_t cap = kDefaultRankCap) {
  if (kind == ExtractorKind::VulnLoc) return {vulnloc_rank(d, spec, cap), {}};
  auto r = aurora_extract(d, spec, cap);
  return {std::move(r.ranking), std::move(r.predicates)};
}

// Shortest decimal that reads back to the same double.
inline std::string format_score(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string ranking_csv(const Ranking& r) {
  std::string out = "rank,score,file,line\n";
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    out += std::to_string(i + 1) + ',' + format_score(e.score) + ',' +
           e.location.file + ',' + std::to_string(e.location.line) + '\n';
  }
  return out;
}

inline std::string predicates_csv(const std::vector<PredicateScore>& ps) {
  std::string out = "score,file,line,form,threshold\n";
  for (const auto& s : ps) {
    const auto& p = s.predicate;
    std::string form = p.polarity == Polarity::Negated ? "not_" : "";
    form += to_string(p.form);
    if (p.kind == SiteKind::Value && p.form != PredicateForm::ValueGE &&
        p.form != PredicateForm::ValueEQ) {
      form += "@value";
    }
    out += format_score(s.score) + ',' + p.site.location.file + ',' +
           std::to_string(p.site.location.line) + ',' + form + ',' +
           (p.form == PredicateForm::Executed ? "" : std::to_string(p.threshold)) +
           '\n';
  }
  return out;
}

}  // namespace rcab
