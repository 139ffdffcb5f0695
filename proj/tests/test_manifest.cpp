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

#include "rcab/manifest.hpp"
#include "test_support.hpp"

namespace rcab {
namespace {

using testing::TempDir;

const char* kOffByOne = R"(# off-by-one target
id = offbyone
exec = ./offbyone @@
input_mode = FileArg
timeout_ms = 500
crash_signals = 11, 6
crash_exit_codes = 77

[block_map]
1 offbyone.c:10
2 offbyone.c:14 cond

[ground_truth]
offbyone.c:14 guard that admits count == 4
)";

TEST(LoadManifest, OffByOneShape) {
  TempDir dir;
  const auto spec = testing::spec_from_text(dir, kOffByOne);
  EXPECT_EQ(spec.id, "offbyone");
  EXPECT_EQ(spec.exec, (std::vector<std::string>{"./offbyone", "@@"}));
  EXPECT_EQ(spec.input_mode, InputMode::FileArg);
  EXPECT_EQ(spec.timeout_ms, 500u);
  EXPECT_EQ(spec.crash.crash_signals, (std::vector<int>{11, 6}));
  EXPECT_EQ(spec.crash.crash_exit_codes, (std::vector<int>{77}));
  ASSERT_EQ(spec.seeds.size(), 1u);
  EXPECT_EQ(spec.seeds[0], dir.path() / "seed.bin");
  ASSERT_EQ(spec.block_map.size(), 2u);
  EXPECT_TRUE(spec.block_map[1].conditional);
  EXPECT_FALSE(spec.block_map[0].conditional);
  ASSERT_EQ(spec.ground_truth.candidates.size(), 1u);
  EXPECT_EQ(spec.ground_truth.candidates[0], (Location{"offbyone.c", 14}));
  EXPECT_EQ(spec.ground_truth.notes[0], "guard that admits count == 4");
  EXPECT_FALSE(spec.mock);
}

TEST(LoadManifest, ShippedMocksLoad) {
  for (const char* name : {"m1", "m2", "m3", "m4", "m5"}) {
    const auto spec = load_manifest(testing::mock_target(name));
    EXPECT_EQ(spec.id, name);
    EXPECT_TRUE(spec.mock);
    EXPECT_FALSE(spec.seeds.empty());
  }
  EXPECT_EQ(load_manifest(testing::mock_target("m5")).ground_truth.candidates.size(),
            2u);
}

TEST(LoadManifest, ValueSitesFallBackToBlockMap) {
  TempDir dir;
  const auto spec = testing::spec_from_text(
      dir, "id = t\n[block_map]\n1 a.c:1\n[ground_truth]\na.c:1\n[mock]\nVAL 1\n");
  ASSERT_NE(spec.value_site(1), nullptr);
  EXPECT_EQ(spec.value_site(1)->location, (Location{"a.c", 1}));
}

TEST(LoadManifest, SeedsMustBeNonEmpty) {
  TempDir dir;
  write_file(dir.path() / "t.target",
             "id = t\nexec = ./t @@\n[block_map]\n1 a.c:1\n[ground_truth]\na.c:1\n");
  EXPECT_THROW(load_manifest(dir.path() / "t.target"), ValidationError);
}

TEST(LoadManifest, GroundTruthMustResolve) {
  TempDir dir;
  EXPECT_THROW(testing::spec_from_text(
                   dir, "id = t\nexec = ./t @@\n[block_map]\n1 a.c:1\n"
                        "[ground_truth]\na.c:2\n"),
               ValidationError);
}

TEST(LoadManifest, ValidationErrors) {
  TempDir dir;
  const std::string tail = "[block_map]\n1 a.c:1\n[ground_truth]\na.c:1\n";
  const std::string bad[] = {
      "id = t\n" + tail,                                   // no exec, no mock
      "id = t\nexec = ./t\n" + tail,                       // FileArg without @@
      "id = t\nexec = ./t @@ @@\n" + tail,                 // two placeholders
      "id = t\nexec = ./t @@\ninput_mode = Stdin\n" + tail,
      "id = t\nexec = ./t @@\ntimeout_ms = 0\n" + tail,
      "exec = ./t @@\n" + tail,                            // no id
      "id = t\nexec = ./t @@\n[block_map]\n1 a.c:1\n1 a.c:2\n[ground_truth]\na.c:1\n",
      "id = t\nexec = ./t @@\n[block_map]\n1 a.c:1\n",     // no ground truth
      "id = t\n[block_map]\n1 a.c:1\n[ground_truth]\na.c:1\n[mock]\nEMIT 2\n",
      "id = t\n[block_map]\n1 a.c:1\n[value_map]\n5 a.c:1\n[ground_truth]\n"
      "a.c:1\n[mock]\nVAL 1\n",
  };
  for (const auto& text : bad) {
    EXPECT_THROW(testing::spec_from_text(dir, text), ValidationError) << text;
  }
}

TEST(LoadManifest, ParseErrorsCarryLineAndColumn) {
  TempDir dir;
  struct Case {
    std::string text;
    std::size_t line;  // line in the body; the helper prepends one line
  } cases[] = {
      {"id = t\nnonsense\n", 2},
      {"id = t\nfoo = 1\n", 2},
      {"id = t\nid = u\n", 2},
      {"id = t\n[bogus]\n", 2},
      {"id = t\n[block_map]\n1 a.c\n", 3},
      {"id = t\n[block_map]\nx a.c:1\n", 3},
      {"id = t\n[block_map]\n1 a.c:1 loop\n", 3},
      {"id = t\ninput_mode = Pipe\n", 2},
      {"id = t\ncrash_signals = 11 x\n", 2},
      {"id = t\n[ground_truth]\nnot-a-location\n", 3},
      {"id = t\n[block_map]\n1 a.c:1\n[mock]\nEMIT 1\nFLY 2\n", 6},
  };
  for (const auto& c : cases) {
    try {
      testing::spec_from_text(dir, c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line + 1) << c.text << " -> " << e.what();
      EXPECT_GT(e.column() + 1, 0u);
    }
  }
}

TEST(LoadManifest, MissingFile) {
  EXPECT_THROW(load_manifest("/nonexistent/x.target"), IoError);
}

}  // namespace
}  // namespace rcab
