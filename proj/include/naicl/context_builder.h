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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/bench_dataset.h"
#include "naicl/keywords.h"
#include "naicl/prior_index.h"
#include "naicl/prior_library.h"

namespace naicl {

enum class Variant { kNaiclRetrieval, kNaiclFixed, kIclRealAudio, kBaselineNone };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

inline constexpr std::string_view kDefaultInstruction = "Describe the sounds in this audio clip.";

struct DecodeHint {
  double temperature = 0.0;
  int max_tokens = 256;
};

// Settings naming one ablation row.
struct VariantConfig {
  std::string name;
  Variant variant = Variant::kNaiclRetrieval;
  int shots = static_cast<int>(kDefaultTopK);
  double noise_duration_s = 2.0;
  bool structured = true;
  bool text_only_shots = false;
  std::string instruction = std::string(kDefaultInstruction);
  std::vector<std::string> fixed_ids;  // naicl_fixed: library entry ids, in order
  DecodeHint decode;

  nlohmann::json to_json() const;
  static VariantConfig from_json(const nlohmann::json& j);
  // Keys absent from j keep their value from base.
  static VariantConfig from_json(const nlohmann::json& j, const VariantConfig& base);
};

struct Exemplar {
  std::string id;
  std::filesystem::path audio_path;
  std::string caption;
  bool is_noise = false;
};

// Static exemplars are resolved at plan time; retrieval exemplars arrive
// per sample through the RetrievalContext, so `exemplars` stays empty for
// naicl_retrieval.
struct PromptPlan {
  VariantConfig config;
  std::vector<Exemplar> exemplars;

  Variant variant() const { return config.variant; }
  std::size_t shots() const { return static_cast<std::size_t>(config.shots); }
};

// Throws kEmpty for naicl_fixed without exemplars, kInvalidArgument for
// unknown fixed ids, a shot count the pool cannot satisfy or a noise
// duration that disagrees with the library.
PromptPlan plan_variant(const VariantConfig& config, const PriorLibrary* library,
                        std::span<const BenchmarkRecord> icl_pool = {},
                        const std::filesystem::path& icl_audio_root = {});

struct ContentPart {
  enum class Kind { kText, kAudio };
  Kind kind = Kind::kText;
  std::string text;             // kText
  std::filesystem::path audio;  // kAudio

  static ContentPart Text(std::string t) { return {Kind::kText, std::move(t), {}}; }
  static ContentPart Audio(std::filesystem::path p) { return {Kind::kAudio, {}, std::move(p)}; }
};

struct Message {
  std::string role;
  std::vector<ContentPart> content;
};

struct AssembledRequest {
  std::string sample_id;
  std::vector<Message> messages;
  DecodeHint decode;
  std::vector<std::string> exemplar_ids;

  std::size_t audio_part_count() const;
};

enum class AudioEncoding { kPath, kBase64 };

// Deterministic serialization; kBase64 inlines each WAV file.
nlohmann::json to_json(const AssembledRequest& request, AudioEncoding encoding = AudioEncoding::kPath);

struct AssembleOptions {
  bool check_audio_exists = true;
  // Applied to noise-exemplar captions; a hit throws kForbiddenTerm.
  const KeywordMatcher* event_terms = &default_event_matcher();
};

// Exemplar turns (one user turn per shot: audio part, then caption text)
// followed by a final user turn carrying the instruction and target audio.
// Throws kInvalidArgument on ctx/variant or shot mismatches, kLeakage when
// a real-audio exemplar is the sample itself, kIo for missing audio.
AssembledRequest assemble(const BenchmarkRecord& sample, const std::filesystem::path& sample_audio,
                          const PromptPlan& plan, const RetrievalContext* ctx,
                          const AssembleOptions& options = {});

std::string base64_encode(std::string_view bytes);

}  // namespace naicl
