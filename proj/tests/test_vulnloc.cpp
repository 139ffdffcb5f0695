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

#include "oracles.hpp"
#include "rcab/dataset_io.hpp"
#include "rcab/vulnloc.hpp"

namespace rcab {
namespace {

class VulnLocOnM1 : public ::testing::Test {
 protected:
  Dataset two_samples() const {
    Dataset d("m1", "test", 0);
    d.append(testing::stamped(interpret_mock(*m1_.mock, {4}, m1_.crash), 1));
    d.append(testing::stamped(interpret_mock(*m1_.mock, {0}, m1_.crash), 2));
    return d;
  }
  TargetSpec m1_ = load_manifest(testing::mock_target("m1"));
};

TEST_F(VulnLocOnM1, HandCountedSpectrum) {
  const auto c = spectrum_counts(two_samples(), m1_);
  EXPECT_EQ(c.n_crash, 1u);
  EXPECT_EQ(c.n_noncrash, 1u);
  EXPECT_EQ(c.per_location.at(Location{"m1.c", 4}), (Spectrum{1, 0, 0, 1}));
  const auto& b1 = c.per_location.at(Location{"m1.c", 2});
  EXPECT_EQ(b1.a_ef, 1u);
  EXPECT_EQ(b1.a_ep, 1u);
}

TEST_F(VulnLocOnM1, DegenerateDatasets) {
  EXPECT_THROW(spectrum_counts(Dataset{}, m1_), DegenerateDataset);
  Dataset crashes;
  crashes.append(testing::stamped(interpret_mock(*m1_.mock, {4}, m1_.crash), 1));
  EXPECT_THROW(spectrum_counts(crashes, m1_), DegenerateDataset);
  EXPECT_THROW(vulnloc_rank(crashes, m1_), DegenerateDataset);
}

TEST_F(VulnLocOnM1, TimeoutsAreNotCounted) {
  auto d = two_samples();
  Sample t = interpret_mock(*m1_.mock, {4}, m1_.crash);
  t.trace.terminal.reset();
  t.verdict = Verdict::timeout();
  d.append(testing::stamped(t, 3));
  const auto c = spectrum_counts(d, m1_);
  EXPECT_EQ(c.n_crash + c.n_noncrash, 2u);
  EXPECT_EQ(c.per_location.at(Location{"m1.c", 4}).a_ef, 1u);
}

TEST(Ochiai, Examples) {
  EXPECT_EQ(ochiai({4, 0, 0, 0}), 1.0);
  EXPECT_EQ(ochiai({2, 2, 2, 0}), 0.5);
  EXPECT_EQ(ochiai({0, 3, 5, 1}), 0.0);
  EXPECT_EQ(ochiai({0, 0, 0, 0}), 0.0);
}

TEST(Ochiai, MonotoneInEachCount) {
  Rng rng(41);
  for (int i = 0; i < 2000; ++i) {
    Spectrum c{rng.below(50), rng.below(50), rng.below(50), rng.below(50)};
    const double s = ochiai(c);
    auto more = c;
    ++more.a_ef;
    EXPECT_GE(ochiai(more), s);
    more = c;
    ++more.a_ep;
    EXPECT_LE(ochiai(more), s);
    more = c;
    ++more.a_nf;
    EXPECT_LE(ochiai(more), s);
  }
}

TEST(Ochiai, PerfectExactlyWhenOnlyCrashesExecuteAndAllDo) {
  Rng rng(42);
  for (int i = 0; i < 5000; ++i) {
    Spectrum c{rng.below(4), rng.below(4), rng.below(4), rng.below(4)};
    const bool perfect = c.a_ef > 0 && c.a_nf == 0 && c.a_ep == 0;
    EXPECT_EQ(ochiai(c) == 1.0, perfect);
    EXPECT_GE(ochiai(c), 0.0);
    EXPECT_LE(ochiai(c), 1.0);
  }
}

TEST_F(VulnLocOnM1, GuardLineRanksFirst) {
  const auto r = vulnloc_rank(two_samples(), m1_);
  ASSERT_EQ(r.entries.size(), 2u);
  EXPECT_EQ(r.entries[0].location, (Location{"m1.c", 4}));
  EXPECT_EQ(r.entries[0].score, 1.0);
  EXPECT_EQ(rank_of_ground_truth(r, m1_.ground_truth), 1u);
  EXPECT_EQ(vulnloc_rank(two_samples(), m1_, 1).entries.size(), 1u);
}

TEST_F(VulnLocOnM1, AlwaysExecutedLocation) {
  // Block 1 runs in every sample: 3 crash, 2 non-crash.
  const auto d = testing::sampled_dataset(m1_, 3, 2, 5);
  const auto r = vulnloc_rank(d, m1_);
  double entry = -1;
  for (const auto& e : r.entries) {
    if (e.location == Location{"m1.c", 2}) entry = e.score;
  }
  EXPECT_DOUBLE_EQ(entry, 3.0 / std::sqrt(3.0 * 5.0));
  EXPECT_LT(entry, 1.0);
}

TEST(VulnLocProperties, MatchesReferenceOnRandomDatasets) {
  Rng rng(2024);
  int checked = 0;
  while (checked < 30) {
    testing::TempDir dir;
    const auto spec = testing::random_mock_target(dir, rng);
    const auto d = testing::random_mock_dataset(spec, rng, 1000);
    if (d.empty()) continue;
    ++checked;
    save_dataset(d, dir.path() / "ds");
    const auto expect = testing::oracle_vulnloc(dir.path() / "ds", spec);
    const auto got = vulnloc_rank(load_dataset(dir.path() / "ds"), spec);
    ASSERT_EQ(got.entries.size(), std::min<std::size_t>(expect.size(), 200));
    for (std::size_t i = 0; i < got.entries.size(); ++i) {
      EXPECT_EQ(got.entries[i].location.file, expect[i].file) << i;
      EXPECT_EQ(got.entries[i].location.line, expect[i].line) << i;
      EXPECT_NEAR(got.entries[i].score, expect[i].score, 1e-12) << i;
    }
  }
}

TEST(VulnLocProperties, DuplicatingSamplesKeepsScores) {
  Rng rng(77);
  int checked = 0;
  while (checked < 20) {
    testing::TempDir dir;
    const auto spec = testing::random_mock_target(dir, rng);
    const auto d = testing::random_mock_dataset(spec, rng, 200);
    if (d.empty()) continue;
    ++checked;
    for (std::size_t k : {2u, 3u}) {
      Dataset dup;
      Tick t = 0;
      for (std::size_t rep = 0; rep < k; ++rep) {
        for (const auto& s : d.samples()) dup.append(testing::stamped(s, ++t));
      }
      const auto a = spectrum_counts(d, spec);
      const auto b = spectrum_counts(dup, spec);
      ASSERT_EQ(a.per_location.size(), b.per_location.size());
      for (const auto& [loc, c] : a.per_location) {
        const auto& scaled = b.per_location.at(loc);
        EXPECT_EQ(scaled.a_ef, k * c.a_ef);
        EXPECT_EQ(scaled.a_ep, k * c.a_ep);
        EXPECT_NEAR(ochiai(scaled), ochiai(c), 1e-12) << loc.to_string();
        if (k == 2) {
          EXPECT_EQ(ochiai(scaled), ochiai(c));
        }
      }
    }
  }
}

}  // namespace
}  // namespace rcab
