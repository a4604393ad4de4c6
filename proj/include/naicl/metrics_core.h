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

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/judge_engine.h"
#include "naicl/keywords.h"

namespace naicl {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kRateDecimals = 2;
inline constexpr int kFrequencyDecimals = 4;

// Percent of judged samples with at least one type; unjudgeable outcomes
// are excluded from the denominator. Throws kEmpty when nothing was judged.
double hallucination_rate(std::span<const JudgeOutcome> outcomes);
double hallucination_rate(std::span<const JudgeVerdict> verdicts);

// Per type t: percent of judged samples whose verdict contains t, in
// kHallucinationTypes order.
std::array<double, 4> type_rates(std::span<const JudgeOutcome> outcomes);
std::array<double, 4> type_rates(std::span<const JudgeVerdict> verdicts);

// Additive so that callers can shard captions and merge.
struct KeywordCounts {
  std::size_t captions = 0;
  std::array<std::size_t, 3> hits{};  // event, definite, acoustic

  KeywordCounts& operator+=(const KeywordCounts& other);
};

struct KeywordFrequencies {
  double event = 0.0;
  double definite = 0.0;
  double acoustic = 0.0;

  double get(KeywordCategory category) const;
};

KeywordCounts count_keywords(std::span<const std::string> captions, const KeywordSets& sets,
                             bool stemming = false);
KeywordFrequencies frequencies(const KeywordCounts& counts);
// Fraction of captions containing at least one term of each set. Throws
// kEmpty for an empty caption list; an empty set yields 0.
KeywordFrequencies keyword_frequency(std::span<const std::string> captions, const KeywordSets& sets,
                                     bool stemming = false);

struct EvaluationReport {
  std::string run_id;
  nlohmann::json variant = nlohmann::json::object();
  std::size_t n_samples = 0;
  std::size_t n_judged = 0;
  std::size_t unjudgeable = 0;
  std::size_t generation_failures = 0;
  std::size_t judge_failures = 0;
  double hr_percent = 0.0;
  std::array<double, 4> type_rates{};
  KeywordFrequencies freq;
  bool stemming = false;
  nlohmann::json config_snapshot = nlohmann::json::object();

  std::string row_label() const;
  nlohmann::json to_json() const;
  static EvaluationReport from_json(const nlohmann::json& j);
};

enum class ReportFormat { kJson, kMarkdown };

// Markdown columns follow the per-model results table (HR, then the four
// types) extended with the three keyword frequencies; one row per report.
std::string render_markdown(std::span<const EvaluationReport> rows);
std::string render_report(const EvaluationReport& report, ReportFormat format);

}  // namespace naicl
