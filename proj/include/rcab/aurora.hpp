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

// Predicate-based extraction, modelled loosely on Aurora (Blazytko et al.).
//
// Predicates are simple Boolean tests over one site's observations in a
// sample: whether it ran, how often, and the last value recorded there. Each
// is scored by balanced accuracy against the crash labels, taking the better
// of the predicate and its negation, so scores lie in [0.5, 1]. A location's
// score is the best score of any predicate placed on it.
//
// Thresholds come from the data. Hit-count and value thresholds sit between
// consecutive distinct observations, which covers every distinct split of the
// samples. Equality tests are only generated for sites with at most
// kMaxEqValues distinct values.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcab/error.hpp"
#include "rcab/manifest.hpp"
#include "rcab/model.hpp"
#include "rcab/vulnloc.hpp"

namespace rcab {

inline constexpr std::size_t kMaxEqValues = 16;

enum class SiteKind { Block, Value };
enum class PredicateForm { Executed, HitCountGE, ValueGE, ValueEQ };
enum class Polarity { AsIs, Negated };

inline const char* to_string(PredicateForm f) {
  switch (f) {
    case PredicateForm::Executed: return "executed";
    case PredicateForm::HitCountGE: return "hitcount_ge";
    case PredicateForm::ValueGE: return "value_ge";
    case PredicateForm::ValueEQ: return "value_eq";
  }
  return "?";
}

struct Predicate {
  BlockSite site;
  SiteKind kind = SiteKind::Block;
  PredicateForm form = PredicateForm::Executed;
  std::int64_t threshold = 0;  // unused for Executed
  Polarity polarity = Polarity::AsIs;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct PredicateScore {
  Predicate predicate;
  double score = 0.5;
};

// What one sample shows at one site.
struct SiteObservation {
  std::uint64_t hits = 0;
  std::optional<std::int64_t> last_value;
};

inline SiteObservation observe(const Trace& t, SiteKind kind, std::uint32_t id) {
  SiteObservation o;
  const auto want = kind == SiteKind::Block ? EventKind::Block : EventKind::Value;
  for (const auto& e : t.events) {
    if (e.kind != want || e.id != id) continue;
    ++o.hits;
    if (kind == SiteKind::Value) o.last_value = e.value;
  }
  return o;
}

inline bool holds(const Predicate& p, const SiteObservation& o) {
  bool v = false;
  switch (p.form) {
    case PredicateForm::Executed:
      v = o.hits > 0;
      break;
    case PredicateForm::HitCountGE:
      v = p.threshold >= 0 && o.hits >= static_cast<std::uint64_t>(p.threshold);
      break;
    case PredicateForm::ValueGE:
      v = o.last_value && *o.last_value >= p.threshold;
      break;
    case PredicateForm::ValueEQ:
      v = o.last_value && *o.last_value == p.threshold;
      break;
  }
  return p.polarity == Polarity::AsIs ? v : !v;
}

inline bool holds(const Predicate& p, const Sample& s) {
  return holds(p, observe(s.trace, p.kind, p.site.id));
}

namespace detail {

// Balanced accuracy of the predicate and of its negation, from counts of
// satisfying crash samples and satisfying non-crash samples.
struct Separation {
  double as_is;
  double negated;
};

inline Separation separation(std::size_t sat_crash, std::size_t n_crash,
                             std::size_t sat_noncrash, std::size_t n_noncrash) {
  const double nc = static_cast<double>(n_crash);
  const double nn = static_cast<double>(n_noncrash);
  const double sc = static_cast<double>(sat_crash);
  const double sn = static_cast<double>(sat_noncrash);
  return {0.5 * (sc / nc + (nn - sn) / nn), 0.5 * ((nc - sc) / nc + sn / nn)};
}

inline PredicateScore best_polarity(Predicate p, std::size_t sat_crash,
                                    std::size_t n_crash,
                                    std::size_t sat_noncrash,
                                    std::size_t n_noncrash) {
  const auto s = separation(sat_crash, n_crash, sat_noncrash, n_noncrash);
  p.polarity = s.as_is >= s.negated ? Polarity::AsIs : Polarity::Negated;
  return {p, std::max(s.as_is, s.negated)};
}

// Smallest integer strictly above lo and at most hi: ceil((lo + hi) / 2).
inline std::int64_t ceil_midpoint(std::int64_t lo, std::int64_t hi) {
  const auto diff = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + diff / 2 +
                                   diff % 2);
}

struct SiteRef {
  BlockSite site;
  SiteKind kind;
};

inline std::vector<SiteRef> all_sites(const TargetSpec& spec) {
  std::vector<SiteRef> out;
  for (const auto& b : spec.block_map) out.push_back({b, SiteKind::Block});
  for (const auto& v : spec.value_sites()) out.push_back({v, SiteKind::Value});
  return out;
}

// Observations of every site in every countable sample, plus labels.
struct FeatureTable {
  std::vector<SiteRef> sites;
  std::vector<bool> crash;                         // per countable sample
  std::vector<std::vector<SiteObservation>> obs;   // [site][sample]
  std::size_t n_crash = 0;
  std::size_t n_noncrash = 0;
};

inline FeatureTable feature_table(const Dataset& d, const TargetSpec& spec) {
  require_both_classes(d);
  FeatureTable t;
  t.sites = all_sites(spec);
  std::unordered_map<std::uint32_t, std::size_t> block_index, value_index;
  for (std::size_t i = 0; i < t.sites.size(); ++i) {
    auto& index = t.sites[i].kind == SiteKind::Block ? block_index : value_index;
    index.emplace(t.sites[i].site.id, i);
  }
  std::size_t n = 0;
  for (const auto& s : d.samples()) n += s.verdict.countable();
  t.obs.assign(t.sites.size(), std::vector<SiteObservation>(n));
  std::size_t col = 0;
  for (const auto& s : d.samples()) {
    if (!s.verdict.countable()) continue;
    const bool crash = s.verdict.is_crash();
    t.crash.push_back(crash);
    (crash ? t.n_crash : t.n_noncrash)++;
    for (const auto& e : s.trace.events) {
      const auto& index = e.kind == EventKind::Block ? block_index : value_index;
      const auto it = index.find(e.id);
      if (it == index.end()) continue;
      auto& o = t.obs[it->second][col];
      ++o.hits;
      if (e.kind == EventKind::Value) o.last_value = e.value;
    }
    ++col;
  }
  return t;
}

// Per distinct key: how many crash and non-crash samples carry it.
using KeyCounts = std::map<std::int64_t, std::pair<std::size_t, std::size_t>>;

// Scores every ">= threshold" split of `keys` by sweeping from the top.
// Threshold candidates are the ceiling midpoints between consecutive keys.
inline void sweep_ge(const Predicate& base, const KeyCounts& keys,
                     std::size_t n_crash, std::size_t n_noncrash,
                     std::vector<PredicateScore>& out) {
  if (keys.size() < 2) return;
  std::size_t sat_c = 0, sat_n = 0;
  for (auto it = keys.rbegin(); std::next(it) != keys.rend(); ++it) {
    sat_c += it->second.first;
    sat_n += it->second.second;
    Predicate p = base;
    p.threshold = ceil_midpoint(std::next(it)->first, it->first);
    out.push_back(best_polarity(p, sat_c, n_crash, sat_n, n_noncrash));
  }
}

}  // namespace detail

// Candidate predicates, all with AsIs polarity.
inline std::vector<Predicate> synthesize(const Dataset& d, const TargetSpec& spec) {
  const auto table = detail::feature_table(d, spec);
  std::vector<Predicate> out;
  for (std::size_t i = 0; i < table.sites.size(); ++i) {
    const auto& [site, kind] = table.sites[i];
    out.push_back({site, kind, PredicateForm::Executed, 0, Polarity::AsIs});
    std::vector<std::int64_t> hits, values;
    for (const auto& o : table.obs[i]) {
      if (o.hits > 0) hits.push_back(static_cast<std::int64_t>(o.hits));
      if (o.last_value) values.push_back(*o.last_value);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (std::size_t k = 1; k < hits.size(); ++k) {
      out.push_back({site, kind, PredicateForm::HitCountGE,
                     detail::ceil_midpoint(hits[k - 1], hits[k]), Polarity::AsIs});
    }
    if (kind != SiteKind::Value) continue;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 1; k < values.size(); ++k) {
      out.push_back({site, kind, PredicateForm::ValueGE,
                     detail::ceil_midpoint(values[k - 1], values[k]),
                     Polarity::AsIs});
    }
    if (values.size() <= kMaxEqValues) {
      for (auto v : values) {
        out.push_back({site, kind, PredicateForm::ValueEQ, v, Polarity::AsIs});
      }
    }
  }
  return out;
}

// Polarity-maxed balanced accuracy. Throws DegenerateDataset.
inline PredicateScore score_predicate(const Predicate& p, const Dataset& d) {
  require_both_classes(d);
  std::size_t nc = 0, nn = 0, sc = 0, sn = 0;
  Predicate as_is = p;
  as_is.polarity = Polarity::AsIs;
  for (const auto& s : d.samples()) {
    if (!s.verdict.countable()) continue;
    const bool sat = holds(as_is, s);
    if (s.verdict.is_crash()) {
      ++nc;
      sc += sat;
    } else {
      ++nn;
      sn += sat;
    }
  }
  return detail::best_polarity(as_is, sc, nc, sn, nn);
}

// Scores the synthesized candidates in one pass per site.
inline std::vector<PredicateScore> score_all(const Dataset& d,
                                             const TargetSpec& spec) {
  const auto table = detail::feature_table(d, spec);
  const auto nc = table.n_crash, nn = table.n_noncrash;
  std::vector<PredicateScore> out;
  for (std::size_t i = 0; i < table.sites.size(); ++i) {
    const auto& [site, kind] = table.sites[i];
    detail::KeyCounts hits, values;
    std::size_t exec_c = 0, exec_n = 0;
    for (std::size_t j = 0; j < table.crash.size(); ++j) {
      const auto& o = table.obs[i][j];
      const bool c = table.crash[j];
      if (o.hits > 0) {
        (c ? exec_c : exec_n)++;
        auto& h = hits[static_cast<std::int64_t>(o.hits)];
        (c ? h.first : h.second)++;
      }
      if (o.last_value) {
        auto& v = values[*o.last_value];
        (c ? v.first : v.second)++;
      }
    }
    out.push_back(detail::best_polarity(
        {site, kind, PredicateForm::Executed, 0, Polarity::AsIs}, exec_c, nc,
        exec_n, nn));
    detail::sweep_ge({site, kind, PredicateForm::HitCountGE, 0, Polarity::AsIs},
                     hits, nc, nn, out);
    if (kind != SiteKind::Value) continue;
    detail::sweep_ge({site, kind, PredicateForm::ValueGE, 0, Polarity::AsIs},
                     values, nc, nn, out);
    if (values.size() <= kMaxEqValues) {
      for (const auto& [v, counts] : values) {
        out.push_back(detail::best_polarity(
            {site, kind, PredicateForm::ValueEQ, v, Polarity::AsIs},
            counts.first, nc, counts.second, nn));
      }
    }
  }
  return out;
}

inline Ranking rank_locations(const std::vector<PredicateScore>& scores,
                              std::size_t cap = kDefaultRankCap) {
  std::map<Location, double> best;
  for (const auto& s : scores) {
    auto [it, fresh] = best.emplace(s.predicate.site.location, s.score);
    if (!fresh) it->second = std::max(it->second, s.score);
  }
  std::vector<RankEntry> entries;
  entries.reserve(best.size());
  for (const auto& [loc, score] : best) entries.push_back({loc, score});
  return make_ranking(std::move(entries), cap);
}

struct AuroraResult {
  Ranking ranking;
  // Sorted by score descending, then location, form and threshold.
  std::vector<PredicateScore> predicates;
};

inline AuroraResult aurora_extract(const Dataset& d, const TargetSpec& spec,
                                   std::size_t cap = kDefaultRankCap) {
  auto scores = score_all(d, spec);
  std::stable_sort(scores.begin(), scores.end(),
                   [](const PredicateScore& a, const PredicateScore& b) {
                     if (a.score != b.score) return a.score > b.score;
                     const auto& pa = a.predicate;
                     const auto& pb = b.predicate;
                     if (pa.site.location != pb.site.location) {
                       return pa.site.location < pb.site.location;
                     }
                     if (pa.form != pb.form) return pa.form < pb.form;
                     return pa.threshold < pb.threshold;
                   });
  auto ranking = rank_locations(scores, cap);
  return {std::move(ranking), std::move(scores)};
}

inline Ranking aurora_rank(const Dataset& d, const TargetSpec& spec,
                           std::size_t cap = kDefaultRankCap) {
  return rank_locations(score_all(d, spec), cap);
}

}  // namespace rcab
