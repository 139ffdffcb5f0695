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

#include <gtest/gtest.h>

#include <sstream>

#include "rcab/report.hpp"
#include "test_support.hpp"

namespace rcab {
namespace {

// rank: positive, 0 = absent, -1 = no data.
ResultRow row(const std::string& aug, const std::string& ext, std::size_t trial,
              double snapshot, long rank, const std::string& target = "t",
              const std::string& seed = "s") {
  ResultRow r;
  r.target = target;
  r.augmenter = aug;
  r.extractor = ext;
  r.seed_id = seed;
  r.trial = trial;
  r.snapshot = snapshot;
  r.kind = rank > 0 ? RankKind::Ranked : rank == 0 ? RankKind::Absent : RankKind::NoData;
  r.rank = rank > 0 ? static_cast<std::size_t>(rank) : 0;
  r.n_crash = 3;
  r.n_noncrash = 5;
  return r;
}

std::size_t lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Results, ParsesWhatBenchWrites) {
  std::vector<SnapshotResult> out(3);
  out[0].target = "m1";
  out[0].seed_id = "m1";
  out[0].point = {50, 5};
  out[0].kind = RankKind::Ranked;
  out[0].rank = 2;
  out[0].n_crash = 10;
  out[0].n_noncrash = 40;
  out[0].wall_ms = 50;
  out[1] = out[0];
  out[1].kind = RankKind::Absent;
  out[1].extractor = ExtractorKind::Aurora;
  out[2] = out[0];
  out[2].kind = RankKind::NoData;
  out[2].augmenter = AugmenterKind::ConcFuzz;
  out[2].point = {3, 0.5};
  const auto rows = parse_results(results_csv(out), "r.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].technique(), "aflcem+vulnloc");
  EXPECT_EQ(rows[0].rank, 2u);
  EXPECT_EQ(rows[0].snapshot, 5.0);
  EXPECT_EQ(rows[0].n_noncrash, 40u);
  EXPECT_EQ(rows[1].kind, RankKind::Absent);
  EXPECT_EQ(rows[1].technique(), "aflcem+aurora");
  EXPECT_EQ(rows[2].kind, RankKind::NoData);
  EXPECT_EQ(rows[2].snapshot, 0.5);
}

TEST(Results, ParseErrors) {
  const std::string h = std::string(kResultsHeader) + "\n";
  EXPECT_THROW(parse_results("", "r"), ParseError);
  EXPECT_THROW(parse_results("target,rank\n", "r"), ParseError);
  EXPECT_THROW(parse_results(h + "a,b,c\n", "r"), ParseError);
  EXPECT_THROW(parse_results(h + "t,aflcem,vulnloc,s,0,5,0,1,1,5\n", "r"), ParseError);
  EXPECT_THROW(parse_results(h + "t,aflcem,vulnloc,s,0,5,first,1,1,5\n", "r"), ParseError);
  EXPECT_THROW(parse_results(h + "t,aflcem,vulnloc,s,0,soon,1,1,1,5\n", "r"), ParseError);
  try {
    parse_results(h + "t,aflcem,vulnloc,s,0,5,1,1,1,5\nbad\n", "r");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_TRUE(parse_results(h, "r").empty());
}

TEST(RankTable, SingleTrialIsRaw) {
  const std::vector<ResultRow> rs{row("aflcem", "vulnloc", 0, 15, 7),
                                  row("aflcem", "vulnloc", 0, 120, 3),
                                  row("aflcem", "vulnloc", 0, 240, 0)};
  const auto t = rank_table(rs);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].cells, (std::vector<std::string>{"7"}));
  EXPECT_EQ(t.rows[1].cells, (std::vector<std::string>{"3"}));
  EXPECT_EQ(t.rows[2].cells, (std::vector<std::string>{"--"}));
}

TEST(RankTable, MedianTreatsAbsentAsWorst) {
  auto cell = [](std::vector<long> ranks) {
    std::vector<ResultRow> rs;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      rs.push_back(row("aflcem", "aurora", i, 15, ranks[i]));
    }
    return rank_table(rs, {15}).rows[0].cells[0];
  };
  EXPECT_EQ(cell({1, 1, 0}), "1");
  EXPECT_EQ(cell({1, 0, 0}), "--");
  EXPECT_EQ(cell({-1, -1}), "N/A");
  EXPECT_EQ(cell({-1, 0}), "--");
  EXPECT_EQ(cell({-1, 4, 9}), "4");
  EXPECT_EQ(cell({9, 33, 47, 12, 15}), "15");
  // Even count: lower median.
  EXPECT_EQ(cell({2, 8}), "2");
}

TEST(RankTable, ShapeAndColumnOrder) {
  std::vector<ResultRow> rs;
  for (const auto* target : {"a", "b"}) {
    for (const auto* aug : {"concfuzz", "aflcem"}) {
      for (const auto* ext : {"vulnloc", "aurora"}) {
        for (double snap : {5.0, 15.0, 120.0, 240.0}) {
          rs.push_back(row(aug, ext, 0, snap, 1, target));
        }
      }
    }
  }
  const auto t = rank_table(rs);
  EXPECT_EQ(t.techniques, canonical_techniques());
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.rows[3].target, "b");
  const auto csv = rank_table_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "target,snapshot,aflcem+aurora,concfuzz+aurora,aflcem+vulnloc,"
            "concfuzz+vulnloc");
  EXPECT_NE(csv.find("\na,15m,1,1,1,1\na,2h,1,1,1,1\na,4h,1,1,1,1\n"), std::string::npos);
}

TEST(RankTable, MissingPointIsNotAvailable) {
  const auto t = rank_table({row("aflcem", "vulnloc", 0, 15, 2)}, {15, 720});
  EXPECT_EQ(t.rows[1].cells[0], "N/A");
}

TEST(SnapshotLabel, Units) {
  EXPECT_EQ(snapshot_label(15), "15m");
  EXPECT_EQ(snapshot_label(120), "2h");
  EXPECT_EQ(snapshot_label(90), "90m");
  EXPECT_EQ(snapshot_label(0.5), "0.5m");
}

TEST(Variance, OrderStatistics) {
  std::vector<ResultRow> rs;
  const long ranks[] = {9, 33, 47, 12, 15};
  for (std::size_t i = 0; i < 5; ++i) rs.push_back(row("aflcem", "aurora", i, 60, ranks[i]));
  for (std::size_t i = 0; i < 5; ++i) rs.push_back(row("aflcem", "aurora", i, 120, 4));
  const auto v = variance_summary(rs);
  ASSERT_EQ(v.rows.size(), 2u);
  EXPECT_TRUE(v.warnings.empty());
  EXPECT_EQ(v.rows[0].stats.min, (RankValue{false, 9}));
  EXPECT_EQ(v.rows[0].stats.median, (RankValue{false, 15}));
  EXPECT_EQ(v.rows[0].stats.max, (RankValue{false, 47}));
  EXPECT_EQ(v.rows[1].stats.min, v.rows[1].stats.max);
}

TEST(Variance, AbsentIsTheCeiling) {
  std::vector<ResultRow> rs{row("aflcem", "aurora", 0, 60, 3),
                            row("aflcem", "aurora", 1, 60, 0),
                            row("aflcem", "aurora", 2, 60, -1)};
  const auto v = variance_summary(rs);
  EXPECT_EQ(v.rows[0].stats.runs, 3u);
  EXPECT_EQ(v.rows[0].stats.with_data, 2u);
  EXPECT_EQ(stat_token(v.rows[0].stats.max), "ABSENT");
  EXPECT_EQ(stat_token(v.rows[0].stats.median), "3");
}

TEST(Variance, SingleTrialWarns) {
  const auto v = variance_summary({row("aflcem", "aurora", 0, 60, 3)});
  ASSERT_EQ(v.warnings.size(), 1u);
  EXPECT_EQ(v.rows[0].stats.min, v.rows[0].stats.max);
}

TEST(EmitPlots, EmptyResultsWriteNothing) {
  testing::TempDir dir;
  EXPECT_THROW(emit_plots({}, dir.path() / "r"), ValidationError);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "r"));
}

TEST(EmitPlots, AccuracyRowCount) {
  std::vector<ResultRow> rs;
  for (const auto* ext : {"vulnloc", "aurora"}) {
    for (double snap : {5, 15, 30, 45, 60, 120, 180, 240}) {
      rs.push_back(row("aflcem", ext, 0, snap, static_cast<long>(snap) % 7));
    }
  }
  testing::TempDir dir;
  emit_plots(rs, dir.path());
  const auto csv = read_file(dir.path() / "fig_accuracy_t.csv");
  EXPECT_EQ(lines(csv), 1u + 16u);
  std::size_t svgs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    const auto name = e.path().filename().string();
    if (name.rfind("fig_accuracy_", 0) == 0 && e.path().extension() == ".svg") ++svgs;
  }
  EXPECT_EQ(svgs, 1u);
  for (const auto* f : {"table2.csv", "table2_trials.csv", "fig_balance_t.csv",
                        "fig_balance_t.svg", "fig_seeds_t.csv", "fig_seeds_t.svg",
                        "fig_variance_t.csv", "fig_variance_t.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  }
}

class ReportOnBench : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    BenchConfig c;
    c.targets = {testing::mock_target("m1"), testing::mock_target("m3")};
    c.trials = 2;
    c.budget = Budget::execs(2400);
    c.scale = ScheduleScale{10, 1};
    c.workers = 1;
    const auto p = plan(c);
    csv_ = new std::string(results_csv(run_plan(p).results));
  }
  static void TearDownTestSuite() { delete csv_; }
  static std::string* csv_;
};
std::string* ReportOnBench::csv_ = nullptr;

TEST_F(ReportOnBench, EveryCoordinateInOneCellAndOnePlotPoint) {
  const auto rows = parse_results(*csv_, "results.csv");
  testing::TempDir dir;
  emit_plots(rows, dir.path());
  for (const auto* target : {"m1", "m3"}) {
    const auto acc = read_file(dir.path() / (std::string("fig_accuracy_") + target + ".csv"));
    std::set<std::pair<std::string, double>> expect;
    for (const auto& r : rows) {
      if (r.target == target) expect.insert({r.technique(), r.snapshot});
    }
    std::istringstream in(acc);
    std::string line;
    std::getline(in, line);
    std::multiset<std::pair<std::string, double>> got;
    while (std::getline(in, line)) {
      const auto a = line.find(','), b = line.find(',', a + 1);
      got.insert({line.substr(0, a), std::stod(line.substr(a + 1, b - a - 1))});
    }
    EXPECT_EQ(got.size(), expect.size());
    EXPECT_EQ(std::set(got.begin(), got.end()), expect);
  }
}

TEST_F(ReportOnBench, ReRunIsByteIdentical) {
  const auto rows = parse_results(*csv_, "results.csv");
  testing::TempDir a, b;
  const auto fa = emit_plots(rows, a.path());
  const auto fb = emit_plots(rows, b.path());
  ASSERT_EQ(fa.written.size(), fb.written.size());
  for (std::size_t i = 0; i < fa.written.size(); ++i) {
    EXPECT_EQ(read_file(fa.written[i]), read_file(fb.written[i]))
        << fa.written[i].filename();
  }
}

TEST_F(ReportOnBench, ConcFuzzBalanceTurnsNonCrashDominant) {
  const auto rows = parse_results(*csv_, "results.csv");
  double last = 0;
  for (const auto& r : rows) last = std::max(last, r.snapshot);
  for (const auto& r : rows) {
    if (r.target == "m1" && r.augmenter == "concfuzz" && r.snapshot == last) {
      EXPECT_GT(r.n_noncrash, r.n_crash);
    }
  }
}

}  // namespace
}  // namespace rcab
