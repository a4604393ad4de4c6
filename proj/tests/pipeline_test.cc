// Copyright (c) 2026 The NAICL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "naicl/acoustic_embed.h"
#include "naicl/error.h"
#include "naicl/noise_forge.h"
#include "naicl/pipeline.h"
#include "naicl/prior_library.h"
#include "naicl/wav.h"
#include "temp_dir.h"

namespace naicl {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

const fs::path kE2e = fs::path(NAICL_FIXTURE_DIR) / "e2e";

void write_tone(const fs::path& path, double hz) {
  AudioBuffer audio;
  audio.samples.resize(32000);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    audio.samples[i] = static_cast<float>(0.3 * std::sin(2 * std::numbers::pi * hz * i / 16000.0));
  }
  write_wav(path, audio);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::copy(kE2e, dir_.path(), fs::copy_options::recursive);
    fs::create_directories(dir_ / "audio");
    for (int i = 0; i < 10; ++i) write_tone(dir_ / ("audio/s0" + std::to_string(i) + ".wav"), 200.0 + 90 * i);
    for (int i = 0; i < 3; ++i) write_tone(dir_ / ("audio/p0" + std::to_string(i) + ".wav"), 2500.0 + 300 * i);
    const auto specs = default_recipe(12);
    auto library = build_library(specs, dir_ / "lib");
    embed_library(library, EmbedderConfig{});
    save_library(library);
  }

  RunConfig config(const std::string& out) const {
    RunConfig c;
    c.manifest = dir_ / "bench.jsonl";
    c.library = dir_ / "lib";
    c.icl_pool = dir_ / "icl_pool.jsonl";
    c.generator.name = "gen";
    c.generator.mock_fixture = dir_ / "generator.json";
    c.judge.name = "judge";
    c.judge.mock_fixture = dir_ / "judge.json";
    c.variant.name = "naicl_retrieval";
    c.out_dir = dir_ / out;
    return c;
  }

  TempDir dir_{"naicl-pipeline"};
};

TEST_F(PipelineTest, EndToEndWithMocks) {
  const auto summary = run_pipeline(config("run"));
  EXPECT_EQ(summary.exit_code, kExitOk);
  EXPECT_EQ(summary.report.n_samples, 10u);
  EXPECT_EQ(summary.report.n_judged, 10u);
  EXPECT_DOUBLE_EQ(summary.report.hr_percent, 30.0);
  EXPECT_DOUBLE_EQ(summary.report.freq.event, 0.7);
  for (const char* f : {kCaptionsFile, kVerdictsFile, kReportJsonFile, kReportMarkdownFile}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const auto captions = read_captions(dir_ / "run" / kCaptionsFile);
  ASSERT_EQ(captions.size(), 10u);
  EXPECT_EQ(captions[0].sample_id, "s00");
  EXPECT_EQ(captions[0].exemplar_ids.size(), kDefaultTopK);
}

TEST_F(PipelineTest, ConcurrencyDoesNotChangeReport) {
  auto a = config("a");
  a.concurrency = 1;
  auto b = config("b");
  b.concurrency = 8;
  run_pipeline(a);
  run_pipeline(b);
  EXPECT_EQ(slurp(dir_ / "a" / kReportJsonFile), slurp(dir_ / "b" / kReportJsonFile));
  EXPECT_EQ(slurp(dir_ / "a" / kCaptionsFile), slurp(dir_ / "b" / kCaptionsFile));
}

TEST_F(PipelineTest, ResumeAfterTornCheckpointMatchesFreshRun) {
  run_pipeline(config("fresh"));
  auto c = config("resumed");
  run_pipeline(c);
  const auto captions_text = slurp(dir_ / "resumed" / kCaptionsFile);
  const auto verdicts_text = slurp(dir_ / "resumed" / kVerdictsFile);
  {
    // Keep four captions and half of a fifth verdict line.
    std::ofstream out(dir_ / "resumed" / kCaptionsFile, std::ios::binary | std::ios::trunc);
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) pos = captions_text.find('\n', pos) + 1;
    out << captions_text.substr(0, pos);
  }
  {
    std::ofstream out(dir_ / "resumed" / kVerdictsFile, std::ios::binary | std::ios::trunc);
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) pos = verdicts_text.find('\n', pos) + 1;
    out << verdicts_text.substr(0, pos + 10);
  }
  EXPECT_EQ(read_verdicts(dir_ / "resumed" / kVerdictsFile).size(), 3u);
  c.resume = true;
  const auto summary = run_pipeline(c);
  EXPECT_EQ(summary.exit_code, kExitOk);
  EXPECT_EQ(slurp(dir_ / "fresh" / kReportJsonFile), slurp(dir_ / "resumed" / kReportJsonFile));
  EXPECT_EQ(slurp(dir_ / "fresh" / kCaptionsFile), slurp(dir_ / "resumed" / kCaptionsFile));
}

TEST_F(PipelineTest, PoolOverlapIsLeakage) {
  auto c = config("leak");
  c.variant.variant = Variant::kIclRealAudio;
  c.icl_pool = c.manifest;
  try {
    run_pipeline(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLeakage);
  }
}

TEST_F(PipelineTest, GenerationFailuresSetExitCode) {
  // Fixture without s09 and no default: one failure out of ten.
  auto fixture = nlohmann::json::parse(slurp(dir_ / "generator.json"));
  fixture.erase("s09");
  fixture.erase("*");
  std::ofstream(dir_ / "gen_partial.json") << fixture.dump();

  auto partial = config("partial");
  partial.generator.mock_fixture = dir_ / "gen_partial.json";
  partial.generator.limits.retries = 0;
  const auto p = run_pipeline(partial);
  EXPECT_EQ(p.exit_code, kExitPartial);
  EXPECT_EQ(p.report.generation_failures, 1u);
  EXPECT_EQ(p.report.n_judged, 9u);

  auto strict = partial;
  strict.out_dir = dir_ / "strict";
  strict.abort_threshold = 0.05;
  EXPECT_EQ(run_pipeline(strict).exit_code, kExitFailure);
}

TEST_F(PipelineTest, JudgeCaptionsRewritesVerdicts) {
  run_pipeline(config("run"));
  const auto captions = read_captions(dir_ / "run" / kCaptionsFile);
  const auto bench = load_manifest(dir_ / "bench.jsonl");
  auto c = config("run");
  auto backend = make_backend(c.judge);
  const auto outcomes = judge_captions(captions, bench, *backend, 2, dir_ / "rejudged.jsonl");
  EXPECT_EQ(outcomes.size(), 10u);
  EXPECT_EQ(slurp(dir_ / "rejudged.jsonl"), slurp(dir_ / "run" / kVerdictsFile));
}

TEST_F(PipelineTest, AblationRejectsEmptyMatrix) {
  std::ofstream(dir_ / "empty.json") << "[]";
  EXPECT_THROW(run_ablation(config("abl"), dir_ / "empty.json"), UsageError);
  std::ofstream(dir_ / "broken.json") << "{";
  EXPECT_THROW(run_ablation(config("abl"), dir_ / "broken.json"), UsageError);
}

TEST_F(PipelineTest, AblationRowsGetDistinctSnapshots) {
  const auto matrix = nlohmann::json::array(
      {{{"name", "r"}, {"variant", "naicl_retrieval"}, {"library", "lib"}},
       {{"name", "none"}, {"variant", "baseline_none"}},
       {{"name", "real"}, {"variant", "icl_real_audio"}, {"icl_pool", "icl_pool.jsonl"}}});
  std::ofstream(dir_ / "m.json") << matrix.dump();
  const auto summary = run_ablation(config("abl"), dir_ / "m.json");
  EXPECT_EQ(summary.exit_code, kExitOk);
  ASSERT_EQ(summary.rows.size(), 3u);
  EXPECT_NE(summary.rows[0].config_snapshot, summary.rows[1].config_snapshot);
  EXPECT_NE(summary.rows[1].config_snapshot, summary.rows[2].config_snapshot);
  EXPECT_TRUE(fs::exists(dir_ / "abl" / "ablation.json"));
  EXPECT_TRUE(fs::exists(dir_ / "abl" / "ablation.md"));
}

}  // namespace
}  // namespace naicl
