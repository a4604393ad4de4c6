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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/bench_dataset.h"
#include "naicl/inference_gateway.h"

namespace naicl {

enum class HallucinationType { kAcousticAttribute, kSourceMaterial, kPriorDriven, kFabricatedEvent };

inline constexpr std::array<HallucinationType, 4> kHallucinationTypes = {
    HallucinationType::kAcousticAttribute, HallucinationType::kSourceMaterial,
    HallucinationType::kPriorDriven, HallucinationType::kFabricatedEvent};

// Wire label, e.g. "source_material".
std::string_view label(HallucinationType type);
// Column title, e.g. "Source / Material".
std::string_view display_name(HallucinationType type);
std::string_view definition(HallucinationType type);
std::optional<HallucinationType> parse_hallucination_type(std::string_view label);

struct VerdictSpan {
  std::string text;
  HallucinationType type = HallucinationType::kFabricatedEvent;
  std::string why;
};

struct JudgeVerdict {
  std::string sample_id;
  bool hallucinated = false;  // always equals !types.empty()
  std::set<HallucinationType> types;
  std::vector<VerdictSpan> spans;
  std::string judge_model;
  std::string raw_response;
  std::vector<std::string> warnings;
};

inline constexpr std::string_view kJudgePromptVersion = "naicl-judge-v1";

// Deterministic. Reference and caption are embedded as JSON string literals
// on their own lines, so no caption content can forge a section marker.
std::string build_judge_prompt(std::string_view caption, std::string_view reference);

struct JudgePromptFields {
  std::string reference;
  std::string caption;
};
// Inverse of build_judge_prompt for the two embedded texts.
JudgePromptFields extract_prompt_fields(std::string_view prompt);

// Extracts the first JSON object in `raw` and validates it. Errors:
// kNoJson, kSchema, kUnknownLabel, kSpanNotFound. Span types are folded
// into `types` and `hallucinated` is recomputed; each fix adds a warning.
JudgeVerdict parse_verdict(std::string_view raw, std::string_view caption);

struct JudgeOutcome {
  std::string sample_id;
  std::optional<JudgeVerdict> verdict;  // empty when unjudgeable
  std::string error;                    // last parse error for unjudgeable samples
  int asks = 0;

  bool unjudgeable() const { return !verdict.has_value(); }
};

// One judge call plus at most one re-ask with a format reminder. Two parse
// failures mark the sample unjudgeable; transport errors propagate.
JudgeOutcome judge(const BenchmarkRecord& sample, const GenerationResult& generation, Backend& backend);

nlohmann::json outcome_to_json(const JudgeOutcome& outcome);
JudgeOutcome outcome_from_json(const nlohmann::json& j);

}  // namespace naicl
