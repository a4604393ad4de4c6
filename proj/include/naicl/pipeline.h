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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/bench_dataset.h"
#include "naicl/context_builder.h"
#include "naicl/inference_gateway.h"
#include "naicl/judge_engine.h"
#include "naicl/keywords.h"
#include "naicl/metrics_core.h"

namespace naicl {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitPartial = 3 };

inline constexpr const char* kCaptionsFile = "captions.jsonl";
inline constexpr const char* kVerdictsFile = "verdicts.jsonl";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportMarkdownFile = "report.md";

// Thrown for invalid command-line input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeywordFiles {
  std::filesystem::path event;
  std::filesystem::path definite;
  std::filesystem::path acoustic;

  bool empty() const { return event.empty() && definite.empty() && acoustic.empty(); }
  KeywordSets load() const;  // built-in defaults when empty
};

struct RunConfig {
  std::string run_id;
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> audio_root;
  std::filesystem::path library;
  std::filesystem::path icl_pool;  // held-out manifest for icl_real_audio
  VariantConfig variant;
  BackendConfig generator;
  BackendConfig judge;
  KeywordFiles keywords;
  bool stemming = false;
  std::uint64_t seed = 7;
  double abort_threshold = kDefaultAbortThreshold;

  // Execution-only settings; they never change results and stay out of the
  // snapshot.
  std::filesystem::path out_dir;
  std::size_t concurrency = 4;
  bool resume = false;

  nlohmann::json snapshot() const;
};

struct CaptionRecord {
  std::string sample_id;
  std::optional<GenerationResult> result;
  std::vector<std::string> exemplar_ids;
  ErrorCode code = ErrorCode::kTransport;
  std::string error;

  nlohmann::json to_json() const;
  static CaptionRecord from_json(const nlohmann::json& j);
};

struct RunSummary {
  EvaluationReport report;
  int exit_code = kExitOk;
  std::vector<std::string> failures;  // "<id>: <message>"
};

// embed -> retrieve -> assemble -> generate -> judge -> metrics, persisting
// captions.jsonl, verdicts.jsonl, report.json and report.md under out_dir.
RunSummary run_pipeline(const RunConfig& config);

// Reads a JSONL file of records; a torn final line (interrupted write) is
// ignored.
std::vector<CaptionRecord> read_captions(const std::filesystem::path& path);
std::vector<JudgeOutcome> read_verdicts(const std::filesystem::path& path);

// Judges successful records of an existing captions.jsonl against the
// manifest references and writes verdicts to `out`.
std::vector<JudgeOutcome> judge_captions(const std::vector<CaptionRecord>& captions, const Benchmark& bench,
                                         Backend& backend, std::size_t concurrency,
                                         const std::filesystem::path& out);

EvaluationReport compute_report(const std::vector<CaptionRecord>& captions,
                                const std::vector<JudgeOutcome>& outcomes, const KeywordSets& sets,
                                bool stemming);

struct AblationSummary {
  std::vector<EvaluationReport> rows;
  std::vector<std::pair<std::string, std::string>> failed;  // name, error
  int exit_code = kExitOk;

  nlohmann::json to_json() const;
};

// Matrix file: JSON array (or {"rows": [...]}) of variant settings; each row
// may also override "library" and "icl_pool" (relative to the matrix file).
// Every row runs in out_dir/<NN>-<name>/; a consolidated ablation.json and
// ablation.md are written to out_dir.
AblationSummary run_ablation(const RunConfig& base, const std::filesystem::path& matrix_file);

}  // namespace naicl
