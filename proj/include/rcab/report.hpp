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

// Tables and figures from results.csv.
//
// Ranks aggregate across trials (and seeds, for the headline table) by the
// lower median, with a missing ground truth sorting after every rank. Runs
// without data are left out; a cell is N/A only when no run has data. Cells
// render as the rank, "--" when the median is absent, or "N/A".

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rcab/bench.hpp"
#include "rcab/svg.hpp"

namespace rcab {

struct ResultRow {
  std::string target;
  std::string augmenter;
  std::string extractor;
  std::string seed_id;
  std::size_t trial = 0;
  double snapshot = 0;  // schedule minutes
  RankKind kind = RankKind::NoData;
  std::size_t rank = 0;
  std::size_t n_crash = 0;
  std::size_t n_noncrash = 0;
  std::uint64_t wall_ms = 0;

  std::string technique() const { return augmenter + "+" + extractor; }
};

inline std::vector<ResultRow> parse_results(std::string_view text,
                                            const std::string& source) {
  std::vector<ResultRow> rows;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kResultsHeader) {
        throw ParseError(source, 1, 1,
                         "expected header '" + std::string(kResultsHeader) + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 10) {
      throw ParseError(source, line_no, 1,
                       "expected 10 fields, got " + std::to_string(f.size()));
    }
    auto u64 = [&](std::size_t i, const char* what) {
      try {
        return detail::parse_u64(f[i], what);
      } catch (const ValidationError& e) {
        throw ParseError(source, line_no, 1, e.what());
      }
    };
    ResultRow r;
    r.target = f[0];
    r.augmenter = f[1];
    r.extractor = f[2];
    r.seed_id = f[3];
    r.trial = u64(4, "trial");
    {
      const auto& s = f[5];
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), r.snapshot);
      if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw ParseError(source, line_no, 1, "invalid snapshot '" + s + "'");
      }
    }
    if (f[6] == "ABSENT") {
      r.kind = RankKind::Absent;
    } else if (f[6] == "NODATA") {
      r.kind = RankKind::NoData;
    } else {
      r.kind = RankKind::Ranked;
      r.rank = u64(6, "rank");
      if (r.rank == 0) throw ParseError(source, line_no, 1, "rank must be >= 1");
    }
    r.n_crash = u64(7, "n_crash");
    r.n_noncrash = u64(8, "n_noncrash");
    r.wall_ms = u64(9, "wall_ms");
    rows.push_back(std::move(r));
  }
  if (line_no == 0) throw ParseError(source, 1, 1, "empty results file");
  return rows;
}

inline std::vector<ResultRow> load_results(const std::filesystem::path& path) {
  return parse_results(read_file(path), path.string());
}

// A rank, or absent (sorts after every rank).
struct RankValue {
  bool absent = false;
  std::size_t rank = 0;

  friend auto operator<=>(const RankValue& a, const RankValue& b) {
    if (a.absent != b.absent) return a.absent <=> b.absent;
    return a.absent ? std::strong_ordering::equal : a.rank <=> b.rank;
  }
  friend bool operator==(const RankValue&, const RankValue&) = default;
};

inline std::optional<RankValue> rank_value(const ResultRow& r) {
  if (r.kind == RankKind::NoData) return std::nullopt;
  return RankValue{r.kind == RankKind::Absent, r.rank};
}

// Order statistics over runs with data.
struct RankStats {
  std::size_t runs = 0;     // including runs without data
  std::size_t with_data = 0;
  std::optional<RankValue> min, median, max;
};

inline RankStats rank_stats(const std::vector<const ResultRow*>& rows) {
  RankStats s;
  s.runs = rows.size();
  std::vector<RankValue> v;
  for (const auto* r : rows) {
    if (auto rv = rank_value(*r)) v.push_back(*rv);
  }
  s.with_data = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.median = v[(v.size() - 1) / 2];
  return s;
}

inline std::string cell_token(const std::optional<RankValue>& v) {
  if (!v) return "N/A";
  return v->absent ? "--" : std::to_string(v->rank);
}

inline std::string stat_token(const std::optional<RankValue>& v) {
  if (!v) return "NODATA";
  return v->absent ? "ABSENT" : std::to_string(v->rank);
}

inline const std::vector<std::string>& canonical_techniques() {
  static const std::vector<std::string> t{"aflcem+aurora", "concfuzz+aurora",
                                          "aflcem+vulnloc", "concfuzz+vulnloc"};
  return t;
}

inline std::vector<std::string> techniques_in(const std::vector<ResultRow>& rows) {
  std::set<std::string> present;
  for (const auto& r : rows) present.insert(r.technique());
  std::vector<std::string> out;
  for (const auto& t : canonical_techniques()) {
    if (present.erase(t)) out.push_back(t);
  }
  out.insert(out.end(), present.begin(), present.end());
  return out;
}

inline std::vector<std::string> targets_in(const std::vector<ResultRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.target) == out.end()) {
      out.push_back(r.target);
    }
  }
  return out;
}

inline const std::vector<double>& default_table_points() {
  static const std::vector<double> p{15, 120, 240};
  return p;
}

// "15m", "2h", "90m".
inline std::string snapshot_label(double minutes) {
  if (minutes == std::floor(minutes) && minutes >= 0) {
    const auto m = static_cast<std::uint64_t>(minutes);
    if (m > 0 && m % 60 == 0) return std::to_string(m / 60) + "h";
    return std::to_string(m) + "m";
  }
  return format_score(minutes) + "m";
}

struct RankTableRow {
  std::string target;
  double snapshot = 0;
  std::vector<std::string> cells;  // parallel to RankTable::techniques
};

struct RankTable {
  std::vector<std::string> techniques;
  std::vector<RankTableRow> rows;
};

inline RankTable rank_table(const std::vector<ResultRow>& results,
                            const std::vector<double>& points = default_table_points()) {
  RankTable t;
  t.techniques = techniques_in(results);
  for (const auto& target : targets_in(results)) {
    for (double point : points) {
      RankTableRow row{target, point, {}};
      for (const auto& tech : t.techniques) {
        std::vector<const ResultRow*> cell;
        for (const auto& r : results) {
          if (r.target == target && r.snapshot == point && r.technique() == tech) {
            cell.push_back(&r);
          }
        }
        row.cells.push_back(cell_token(rank_stats(cell).median));
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

inline std::string rank_table_csv(const RankTable& t) {
  std::string out = "target,snapshot";
  for (const auto& tech : t.techniques) out += "," + tech;
  out += '\n';
  for (const auto& row : t.rows) {
    out += row.target + ',' + snapshot_label(row.snapshot);
    for (const auto& c : row.cells) out += "," + c;
    out += '\n';
  }
  return out;
}

struct VarianceRow {
  std::string target;
  std::string technique;
  std::string seed_id;
  double snapshot = 0;
  RankStats stats;
};

struct VarianceSummary {
  std::vector<VarianceRow> rows;
  std::vector<std::string> warnings;
};

// Spread across trials per (target, technique, seed, snapshot).
inline VarianceSummary variance_summary(const std::vector<ResultRow>& results) {
  using Key = std::tuple<std::size_t, std::size_t, std::string, double>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  const auto techs = techniques_in(results);
  const auto targets = targets_in(results);
  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  for (const auto& r : results) {
    groups[{index_of(targets, r.target), index_of(techs, r.technique()),
            r.seed_id, r.snapshot}]
        .push_back(&r);
  }
  VarianceSummary out;
  std::set<std::string> warned;
  for (const auto& [key, rows] : groups) {
    VarianceRow v{rows.front()->target, rows.front()->technique(),
                  rows.front()->seed_id, rows.front()->snapshot, rank_stats(rows)};
    if (v.stats.runs < 2) {
      const auto what = v.target + " " + v.technique + " " + v.seed_id;
      if (warned.insert(what).second) {
        out.warnings.push_back(what + ": fewer than 2 trials, variance band is degenerate");
      }
    }
    out.rows.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

inline std::vector<double> snapshots_of(const std::vector<const ResultRow*>& rows) {
  std::set<double> s;
  for (const auto* r : rows) s.insert(r->snapshot);
  return {s.begin(), s.end()};
}

// Plot coordinate for a rank: absent maps to the ceiling row.
inline std::optional<double> plot_rank(const std::optional<RankValue>& v,
                                       double ceiling) {
  if (!v) return std::nullopt;
  return v->absent ? ceiling : static_cast<double>(v->rank);
}

inline double rank_ceiling(const std::vector<const ResultRow*>& rows) {
  std::size_t worst = 1;
  for (const auto* r : rows) {
    if (r->kind == RankKind::Ranked) worst = std::max(worst, r->rank);
  }
  double c = 10;
  while (c <= static_cast<double>(worst)) c *= 10;
  return c;
}

}  // namespace detail

struct ReportFiles {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

// Writes table2.csv, table2_trials.csv and, per target, the accuracy,
// balance, seed and variance figures as CSV plus SVG. Throws ValidationError
// on empty results before writing anything.
inline ReportFiles emit_plots(const std::vector<ResultRow>& results,
                              const std::filesystem::path& out_dir,
                              const std::vector<double>& points = default_table_points()) {
  if (results.empty()) throw ValidationError("results are empty; nothing to report");
  std::filesystem::create_directories(out_dir);
  ReportFiles files;
  auto put = [&](const std::string& name, const std::string& body) {
    write_file(out_dir / name, body);
    files.written.push_back(out_dir / name);
  };

  put("table2.csv", rank_table_csv(rank_table(results, points)));
  {
    std::string raw = "target,snapshot,technique,seed_id,trial,rank\n";
    for (const auto& target : targets_in(results)) {
      for (double point : points) {
        for (const auto& tech : techniques_in(results)) {
          for (const auto& r : results) {
            if (r.target != target || r.snapshot != point || r.technique() != tech) {
              continue;
            }
            raw += target + ',' + snapshot_label(point) + ',' + tech + ',' +
                   r.seed_id + ',' + std::to_string(r.trial) + ',' +
                   cell_token(rank_value(r)) + '\n';
          }
        }
      }
    }
    put("table2_trials.csv", raw);
  }

  const auto variance = variance_summary(results);
  files.warnings = variance.warnings;
  const auto techs = techniques_in(results);

  for (const auto& target : targets_in(results)) {
    std::vector<const ResultRow*> rows;
    for (const auto& r : results) {
      if (r.target == target) rows.push_back(&r);
    }
    const auto snaps = detail::snapshots_of(rows);
    const double ceiling = detail::rank_ceiling(rows);
    const auto stem = detail::file_safe(target);

    // Accuracy: median rank per technique over time.
    {
      std::string csv = "technique,snapshot,rank\n";
      svg::Chart chart{"Accuracy vs. augmentation time: " + target,
                       "snapshot (schedule minutes)", "rank of ground truth",
                       svg::YAxis::RankLog, ceiling, {}};
      for (const auto& tech : techs) {
        svg::Series s{tech, {}, true, false, {}};
        bool any = false;
        for (double snap : snaps) {
          std::vector<const ResultRow*> cell;
          for (const auto* r : rows) {
            if (r->technique() == tech && r->snapshot == snap) cell.push_back(r);
          }
          if (cell.empty()) continue;
          any = true;
          const auto med = rank_stats(cell).median;
          csv += tech + ',' + format_score(snap) + ',' + cell_token(med) + '\n';
          s.points.push_back({snap, detail::plot_rank(med, ceiling)});
        }
        if (any) chart.series.push_back(std::move(s));
      }
      put("fig_accuracy_" + stem + ".csv", csv);
      put("fig_accuracy_" + stem + ".svg", svg::render(chart));
    }

    // Balance: one row per campaign and snapshot (extractors share them).
    {
      std::string csv = "augmenter,seed_id,trial,snapshot,n_crash,n_noncrash\n";
      std::map<std::tuple<std::string, std::string, std::size_t, double>,
               std::pair<std::size_t, std::size_t>>
          campaigns;
      for (const auto* r : rows) {
        campaigns.emplace(std::tuple{r->augmenter, r->seed_id, r->trial, r->snapshot},
                          std::pair{r->n_crash, r->n_noncrash});
      }
      for (const auto& [k, v] : campaigns) {
        csv += std::get<0>(k) + ',' + std::get<1>(k) + ',' +
               std::to_string(std::get<2>(k)) + ',' + format_score(std::get<3>(k)) +
               ',' + std::to_string(v.first) + ',' + std::to_string(v.second) + '\n';
      }
      svg::Chart chart{"Inputs over time: " + target, "snapshot (schedule minutes)",
                       "samples (median over runs)", svg::YAxis::Linear, {}, {}};
      std::set<std::string> augs;
      for (const auto* r : rows) augs.insert(r->augmenter);
      for (const auto& aug : augs) {
        svg::Series crash{aug + " crash", {}, false, false, {}};
        svg::Series benign{aug + " non-crash", {}, false, true, {}};
        for (double snap : snaps) {
          std::vector<std::size_t> c, n;
          for (const auto& [k, v] : campaigns) {
            if (std::get<0>(k) == aug && std::get<3>(k) == snap) {
              c.push_back(v.first);
              n.push_back(v.second);
            }
          }
          if (c.empty()) continue;
          std::sort(c.begin(), c.end());
          std::sort(n.begin(), n.end());
          crash.points.push_back({snap, static_cast<double>(c[(c.size() - 1) / 2])});
          benign.points.push_back({snap, static_cast<double>(n[(n.size() - 1) / 2])});
        }
        chart.series.push_back(std::move(crash));
        chart.series.push_back(std::move(benign));
      }
      put("fig_balance_" + stem + ".csv", csv);
      put("fig_balance_" + stem + ".svg", svg::render(chart));
    }

    // Seeds: median over trials, one series per technique and seed.
    {
      std::string csv = "technique,seed_id,snapshot,rank\n";
      svg::Chart chart{"Initial seeds: " + target, "snapshot (schedule minutes)",
                       "rank of ground truth", svg::YAxis::RankLog, ceiling, {}};
      std::set<std::string> seeds;
      for (const auto* r : rows) seeds.insert(r->seed_id);
      std::size_t seed_no = 0;
      for (const auto& seed : seeds) {
        for (const auto& tech : techs) {
          svg::Series s{tech + " " + seed, {}, true, seed_no % 2 == 1, {}};
          for (double snap : snaps) {
            std::vector<const ResultRow*> cell;
            for (const auto* r : rows) {
              if (r->technique() == tech && r->seed_id == seed && r->snapshot == snap) {
                cell.push_back(r);
              }
            }
            if (cell.empty()) continue;
            const auto med = rank_stats(cell).median;
            csv += tech + ',' + seed + ',' + format_score(snap) + ',' +
                   cell_token(med) + '\n';
            s.points.push_back({snap, detail::plot_rank(med, ceiling)});
          }
          if (!s.points.empty()) chart.series.push_back(std::move(s));
        }
        ++seed_no;
      }
      put("fig_seeds_" + stem + ".csv", csv);
      put("fig_seeds_" + stem + ".svg", svg::render(chart));
    }

    // Variance: min / median / max across trials.
    {
      std::string csv = "technique,seed_id,snapshot,trials,min,median,max\n";
      svg::Chart chart{"Variance across trials: " + target,
                       "snapshot (schedule minutes)", "rank of ground truth",
                       svg::YAxis::RankLog, ceiling, {}};
      std::map<std::pair<std::string, std::string>, svg::Series> series;
      std::vector<std::pair<std::string, std::string>> order;
      for (const auto& v : variance.rows) {
        if (v.target != target) continue;
        csv += v.technique + ',' + v.seed_id + ',' + format_score(v.snapshot) + ',' +
               std::to_string(v.stats.runs) + ',' + stat_token(v.stats.min) + ',' +
               stat_token(v.stats.median) + ',' + stat_token(v.stats.max) + '\n';
        const auto key = std::pair{v.technique, v.seed_id};
        auto [it, fresh] = series.try_emplace(key);
        if (fresh) {
          it->second.name = v.technique + " " + v.seed_id;
          order.push_back(key);
        }
        const auto med = detail::plot_rank(v.stats.median, ceiling);
        it->second.points.push_back({v.snapshot, med});
        const auto lo = detail::plot_rank(v.stats.min, ceiling);
        const auto hi = detail::plot_rank(v.stats.max, ceiling);
        it->second.band.push_back({lo.value_or(ceiling), hi.value_or(ceiling)});
      }
      for (const auto& key : order) chart.series.push_back(std::move(series[key]));
      put("fig_variance_" + stem + ".csv", csv);
      put("fig_variance_" + stem + ".svg", svg::render(chart));
    }
  }
  return files;
}

}  // namespace rcab
