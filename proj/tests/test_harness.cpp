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

#include <chrono>
#include <cstdlib>

#include "rcab/harness.hpp"
#include "test_support.hpp"

namespace rcab {
namespace {

using namespace std::chrono_literals;
using testing::TempDir;

std::string fixture_manifest(const char* mode) {
  return std::string("id = fixture\nexec = ") + RCAB_TRACE_FIXTURE +
         (std::string(mode) == "Stdin" ? "" : " @@") +
         "\ninput_mode = " + mode +
         "\ntimeout_ms = 2000\n"
         "[block_map]\n1 fixture.c:10\n2 fixture.c:14 cond\n3 fixture.c:20\n"
         "[ground_truth]\nfixture.c:14 guard\n";
}

class NativeExecute : public ::testing::TestWithParam<const char*> {
 protected:
  TempDir dir_;
  TargetSpec spec_ = testing::spec_from_text(dir_, fixture_manifest(GetParam()));
};

TEST_P(NativeExecute, RegisteredSeedCrashesWithConfiguredSignal) {
  const auto s = execute(spec_, read_bytes(spec_.seeds[0]), 2000ms);
  EXPECT_EQ(s.verdict, Verdict::crash_signal(11));
  EXPECT_EQ(s.trace.events,
            (std::vector<TraceEvent>{TraceEvent::block(1), TraceEvent::val(1, 4),
                                     TraceEvent::block(2)}));
  EXPECT_TRUE(verdict_matches_trace(s.verdict, s.trace));
}

TEST_P(NativeExecute, EmptyInputIsNonCrash) {
  const auto s = execute(spec_, {}, 2000ms);
  EXPECT_EQ(s.verdict, Verdict::non_crash(0));
  EXPECT_EQ(s.trace.terminal, (Terminal{TerminalKind::Exit, 0}));
}

TEST_P(NativeExecute, MissingTerminalIsRepairedOnCrash) {
  const auto s = execute(spec_, {5}, 2000ms);
  EXPECT_EQ(s.verdict, Verdict::crash_signal(11));
  EXPECT_EQ(s.trace.terminal, (Terminal{TerminalKind::Signal, 11}));
  EXPECT_EQ(s.trace.events.back(), TraceEvent::block(2));
}

TEST_P(NativeExecute, AbortIsACrash) {
  EXPECT_EQ(execute(spec_, {6}, 2000ms).verdict, Verdict::crash_signal(SIGABRT));
}

TEST_P(NativeExecute, BrokenTracesAreHarnessErrors) {
  for (std::uint8_t mode : {7, 8, 10, 11}) {
    EXPECT_EQ(execute(spec_, {mode}, 2000ms).verdict.kind,
              VerdictKind::HarnessError)
        << int(mode);
  }
}

TEST_P(NativeExecute, DeadlineYieldsTimeout) {
  const auto start = std::chrono::steady_clock::now();
  const auto s = execute(spec_, {9}, 200ms);
  EXPECT_EQ(s.verdict.kind, VerdictKind::Timeout);
  EXPECT_FALSE(s.trace.terminal);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 2s);
}

TEST_P(NativeExecute, EnvironmentIsCleared) {
  ::setenv("RCAB_LEAK", "1", 1);
  const auto s = execute(spec_, {12}, 2000ms);
  ::unsetenv("RCAB_LEAK");
  EXPECT_EQ(s.verdict, Verdict::non_crash(0));
  EXPECT_EQ(std::count(s.trace.events.begin(), s.trace.events.end(),
                       TraceEvent::block(3)),
            0);
}

TEST_P(NativeExecute, RepeatedRunsAreByteIdentical) {
  Executor ex(spec_);
  for (std::uint8_t mode : {0, 4, 5}) {
    const auto a = ex.run({mode});
    const auto b = ex.run({mode});
    EXPECT_EQ(serialize_trace(a.trace), serialize_trace(b.trace));
    EXPECT_EQ(a.verdict, b.verdict);
  }
}

INSTANTIATE_TEST_SUITE_P(InputModes, NativeExecute,
                         ::testing::Values("FileArg", "Stdin"));

TEST(Execute, MockTargetsRunInProcess) {
  const auto spec = load_manifest(testing::mock_target("m1"));
  const auto s = execute(spec, {4}, 1ms);
  EXPECT_EQ(s.verdict, Verdict::crash_signal(11));
  EXPECT_EQ(execute(spec, {3}, 1ms).verdict, Verdict::non_crash(0));
}

TEST(Execute, MockBlocksAreAllMapped) {
  for (const char* name : {"m1", "m2", "m3", "m4", "m5"}) {
    const auto spec = load_manifest(testing::mock_target(name));
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
      const auto s = interpret_mock(*spec.mock,
                                    testing::interesting_input(*spec.mock, 4, rng),
                                    spec.crash);
      for (const auto& e : s.trace.events) {
        if (e.kind == EventKind::Block) {
          EXPECT_NE(spec.block_site(e.id), nullptr);
        } else {
          EXPECT_NE(spec.value_site(e.id), nullptr);
        }
      }
    }
  }
}

}  // namespace
}  // namespace rcab
