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

#include <set>

#include "rcab/aflcem.hpp"
#include "rcab/coverage.hpp"
#include "rcab/mutate.hpp"
#include "test_support.hpp"

namespace rcab {
namespace {

TEST(Mutate, BitflipIsMsbFirst) {
  Rng rng(0);
  EXPECT_EQ(mutate({0x00}, rng, MutationStage::DetBitflip, 0), (Bytes{0x80}));
  EXPECT_EQ(mutate({0x00}, rng, MutationStage::DetBitflip, 7), (Bytes{0x01}));
  EXPECT_EQ(mutate({0x00, 0x00}, rng, MutationStage::DetBitflip, 8),
            (Bytes{0x00, 0x80}));
}

TEST(Mutate, ArithOrder) {
  Rng rng(0);
  EXPECT_EQ(mutate({0x04}, rng, MutationStage::DetArith, 0), (Bytes{0x05}));
  EXPECT_EQ(mutate({0x04}, rng, MutationStage::DetArith, 1), (Bytes{0x03}));
  EXPECT_EQ(mutate({0x04}, rng, MutationStage::DetArith, 69),
            (Bytes{static_cast<std::uint8_t>(4 - 35)}));
  EXPECT_EQ(mutate({0x00, 0x10}, rng, MutationStage::DetArith, 70),
            (Bytes{0x00, 0x11}));
}

TEST(Mutate, DeterministicStagesEnumerateDistinctMutants) {
  Rng rng(0);
  const Bytes in{1, 2, 3};
  std::set<Bytes> flips, ariths;
  for (std::size_t s = 0; s < stage_steps(MutationStage::DetBitflip, 3); ++s) {
    flips.insert(mutate(in, rng, MutationStage::DetBitflip, s));
  }
  for (std::size_t s = 0; s < stage_steps(MutationStage::DetArith, 3); ++s) {
    ariths.insert(mutate(in, rng, MutationStage::DetArith, s));
  }
  EXPECT_EQ(flips.size(), 24u);
  EXPECT_EQ(ariths.size(), 210u);
}

TEST(Mutate, HavocReproducibleForFixedSeed) {
  Rng a(7), b(7);
  const auto x = mutate({4}, a, MutationStage::Havoc);
  const auto y = mutate({4}, b, MutationStage::Havoc);
  EXPECT_EQ(x, y);
}

TEST(Mutate, HavocRespectsLengthBounds) {
  Rng rng(8);
  for (int i = 0; i < 2000; ++i) {
    Bytes in(1 + rng.below(40));
    const auto out = mutate(in, rng, MutationStage::Havoc, 0, 48);
    EXPECT_GE(out.size(), 1u);
    EXPECT_LE(out.size(), 48u);
  }
}

TEST(Mutate, EmptyInputRejected) {
  Rng rng(0);
  EXPECT_THROW(mutate({}, rng, MutationStage::Havoc), ValidationError);
}

TEST(Coverage, CountClasses) {
  const std::pair<std::uint32_t, int> cases[] = {
      {0, 0},  {1, 1},  {2, 2},  {3, 3},   {4, 4},   {7, 4},   {8, 5},
      {15, 5}, {16, 6}, {31, 6}, {32, 7},  {127, 7}, {128, 8}, {100000, 8}};
  for (const auto& [hits, cls] : cases) EXPECT_EQ(count_class(hits), cls) << hits;
}

TEST(Coverage, EdgesAreDirectional) {
  Trace ab, ba;
  ab.events = {TraceEvent::block(1), TraceEvent::block(2)};
  ba.events = {TraceEvent::block(2), TraceEvent::block(1)};
  EXPECT_NE(CoverageMap::from_trace(ab).signature(),
            CoverageMap::from_trace(ba).signature());
}

TEST(Coverage, HitCountsChangeClass) {
  Trace once, thrice;
  once.events = {TraceEvent::block(1), TraceEvent::block(1)};
  thrice.events = once.events;
  thrice.events.insert(thrice.events.end(), 3, TraceEvent::block(1));
  VirginMap v;
  EXPECT_TRUE(v.merge(CoverageMap::from_trace(once).signature()));
  EXPECT_FALSE(v.merge(CoverageMap::from_trace(once).signature()));
  EXPECT_TRUE(v.has_new(CoverageMap::from_trace(thrice).signature()));
}

TEST(Coverage, ValueEventsIgnored) {
  Trace a, b;
  a.events = {TraceEvent::block(1), TraceEvent::val(1, 3), TraceEvent::block(2)};
  b.events = {TraceEvent::block(1), TraceEvent::block(2)};
  EXPECT_EQ(CoverageMap::from_trace(a).signature(),
            CoverageMap::from_trace(b).signature());
}

class AflCemOnMocks : public ::testing::Test {
 protected:
  TargetSpec m1_ = load_manifest(testing::mock_target("m1"));
};

TEST_F(AflCemOnMocks, SameRngSameDataset) {
  Dataset a("m1", "aflcem", 1), b("m1", "aflcem", 1);
  run_aflcem(m1_, {4}, Budget::execs(2000), 1, a);
  run_aflcem(m1_, {4}, Budget::execs(2000), 1, b);
  ASSERT_EQ(a.size(), 2000u);
  EXPECT_EQ(a, b);
}

TEST_F(AflCemOnMocks, DifferentRngDifferentDataset) {
  Dataset a("m1", "aflcem", 1), b("m1", "aflcem", 2);
  run_aflcem(m1_, {4, 9, 9}, Budget::execs(2000), 1, a);
  run_aflcem(m1_, {4, 9, 9}, Budget::execs(2000), 2, b);
  EXPECT_NE(a, b);
}

TEST_F(AflCemOnMocks, SeedMustCrash) {
  Dataset d;
  EXPECT_THROW(run_aflcem(m1_, {0}, Budget::execs(100), 1, d), SeedNotCrashing);
  EXPECT_TRUE(d.empty());
}

TEST_F(AflCemOnMocks, ZeroBudget) {
  Dataset d;
  EXPECT_THROW(run_aflcem(m1_, {4}, Budget::execs(0), 1, d), BudgetZero);
}

TEST_F(AflCemOnMocks, NonCrashRecordedEarly) {
  for (Tick budget : {2, 8, 256, 300}) {
    Dataset d;
    run_aflcem(m1_, {4}, Budget::execs(budget), 1, d);
    EXPECT_EQ(d.size(), budget);
    EXPECT_GE(dataset_balance(d).n_noncrash, 1u) << budget;
    // The first bitflip turns 0x04 into 0x84.
    EXPECT_EQ(d.samples()[1].input, (Bytes{0x84}));
  }
}

TEST_F(AflCemOnMocks, SeedIsFirstSample) {
  Dataset d;
  run_aflcem(m1_, {4}, Budget::execs(10), 1, d);
  EXPECT_EQ(d.samples().front().input, (Bytes{4}));
  EXPECT_EQ(d.samples().front().born_at, 1u);
}

TEST_F(AflCemOnMocks, QueueHoldsOnlyCrashersAndCoverageGrows) {
  for (const char* name : {"m1", "m2", "m3", "m4", "m5"}) {
    const auto spec = load_manifest(testing::mock_target(name));
    AflCemFuzzer fuzzer(spec);
    Dataset d;
    std::vector<std::size_t> coverage;
    fuzzer.run(read_bytes(spec.seeds[0]), Budget::execs(3000), 5, d,
               [&](const Dataset&) { coverage.push_back(fuzzer.virgin().count()); });
    ASSERT_FALSE(fuzzer.queue().empty());
    for (const auto& entry : fuzzer.queue()) {
      EXPECT_TRUE(interpret_mock(*spec.mock, entry.input, spec.crash)
                      .verdict.is_crash());
    }
    EXPECT_TRUE(std::is_sorted(coverage.begin(), coverage.end()));
    Tick last = 0;
    for (const auto& s : d.samples()) {
      EXPECT_GE(s.born_at, last);
      last = s.born_at;
      EXPECT_TRUE(verdict_matches_trace(s.verdict, s.trace));
    }
    const auto bal = dataset_balance(d);
    EXPECT_GT(bal.n_crash, 0u) << name;
    EXPECT_GT(bal.n_noncrash, 0u) << name;
  }
}

TEST_F(AflCemOnMocks, NewCoverageCrashesAreAdmitted) {
  // Crashing via either branch of m2 gives different edges; both end up queued.
  const auto m2 = load_manifest(testing::mock_target("m2"));
  AflCemFuzzer fuzzer(m2);
  Dataset d;
  fuzzer.run(read_bytes(m2.seeds[0]), Budget::execs(20000), 3, d);
  std::set<bool> via_b;
  for (const auto& e : fuzzer.queue()) via_b.insert(e.input[0] == 1);
  EXPECT_EQ(via_b.size(), 2u);
}

TEST_F(AflCemOnMocks, WallClockBudget) {
  Dataset d;
  run_aflcem(m1_, {4}, Budget::wall_ms(50), 1, d);
  EXPECT_GT(d.size(), 1u);
  EXPECT_LT(d.samples().back().born_at, 1000u);
}

}  // namespace
}  // namespace rcab
