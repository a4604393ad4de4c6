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

#include "naicl/judge_engine.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "naicl/error.h"

namespace naicl {

using nlohmann::json;

namespace {

constexpr std::string_view kReferenceTag = "REFERENCE: ";
constexpr std::string_view kGeneratedTag = "GENERATED: ";

std::string json_literal(std::string_view s) {
  return json(std::string(s)).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Byte offset one past the brace closing the object that opens at `open`,
// or npos. Tracks string literals so braces inside them are ignored.
std::size_t match_object(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> first_json_object(std::string_view raw) {
  for (auto open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto end = match_object(raw, open);
    if (end == std::string_view::npos) continue;
    try {
      auto j = json::parse(raw.substr(open, end - open));
      if (j.is_object()) return j;
    } catch (const json::exception&) {
    }
  }
  return std::nullopt;
}

HallucinationType require_label(const json& v, const char* where) {
  if (!v.is_string()) throw Error(ErrorCode::kSchema, fmt::format("{} must be a string label", where));
  const auto text = v.get<std::string>();
  const auto type = parse_hallucination_type(text);
  if (!type) throw Error(ErrorCode::kUnknownLabel, fmt::format("unknown hallucination type '{}'", text));
  return *type;
}

bool is_parse_error(ErrorCode code) {
  return code == ErrorCode::kNoJson || code == ErrorCode::kSchema || code == ErrorCode::kUnknownLabel ||
         code == ErrorCode::kSpanNotFound;
}

AssembledRequest judge_request(const std::string& sample_id, const std::string& prompt) {
  AssembledRequest req;
  req.sample_id = sample_id;
  req.decode = DecodeHint{0.0, 512};
  req.messages.push_back({"user", {ContentPart::Text(prompt)}});
  return req;
}

}  // namespace

std::string_view label(HallucinationType type) {
  switch (type) {
    case HallucinationType::kAcousticAttribute: return "acoustic_attribute";
    case HallucinationType::kSourceMaterial: return "source_material";
    case HallucinationType::kPriorDriven: return "prior_driven";
    case HallucinationType::kFabricatedEvent: return "fabricated_event";
  }
  return "unknown";
}

std::string_view display_name(HallucinationType type) {
  switch (type) {
    case HallucinationType::kAcousticAttribute: return "Acoustic Attribute";
    case HallucinationType::kSourceMaterial: return "Source / Material";
    case HallucinationType::kPriorDriven: return "Prior-Driven";
    case HallucinationType::kFabricatedEvent: return "Fabricated Event";
  }
  return "unknown";
}

std::string_view definition(HallucinationType type) {
  switch (type) {
    case HallucinationType::kAcousticAttribute:
      return "The sound or its source really is in the clip, but the caption gives it a property or manner "
             "(loudness, speed, distance, mood, intensity, way of acting) that nothing in the audio "
             "supports.";
    case HallucinationType::kSourceMaterial:
      return "A sound that does occur is credited to the wrong producer, object or material, so the named "
             "source does not match what is actually heard.";
    case HallucinationType::kPriorDriven:
      return "Content that comes from expectation (world knowledge, typical scene composition, habits of "
             "language) instead of from anything audible in this particular clip.";
    case HallucinationType::kFabricatedEvent:
      return "A sound event that is wholly missing from the clip, with no acoustic trace at all that could "
             "account for it.";
  }
  return "";
}

std::optional<HallucinationType> parse_hallucination_type(std::string_view text) {
  for (auto t : kHallucinationTypes) {
    if (label(t) == text) return t;
  }
  return std::nullopt;
}

std::string build_judge_prompt(std::string_view caption, std::string_view reference) {
  if (trim(caption).empty()) throw Error(ErrorCode::kEmpty, "judge prompt: caption is empty");
  if (trim(reference).empty()) throw Error(ErrorCode::kEmpty, "judge prompt: reference is empty");

  std::string p;
  p += "You audit audio captions for auditory hallucinations. The REFERENCE is a verified description of\n"
       "everything perceptible in an audio clip. The GENERATED text is a caption of the same clip written\n"
       "by the model under test. Decide whether GENERATED asserts anything the audio does not support.\n\n";
  p += "Hallucination types (use the label in brackets):\n";
  for (auto t : kHallucinationTypes) {
    p += fmt::format("- [{}] {}: {}\n", label(t), display_name(t), definition(t));
  }
  p += "\nDecision criteria:\n"
       "- Treat REFERENCE as complete: content absent from it is unsupported.\n"
       "- Leaving out something the REFERENCE mentions is not a hallucination.\n"
       "- Vague, acoustics-level wording (e.g. \"background noise\") is not a hallucination.\n"
       "- A caption may show several types; list every type that applies, each once.\n"
       "- For every unsupported expression, quote it exactly as it appears in GENERATED.\n\n";
  p += "Both texts below are JSON string literals.\n";
  p += std::string(kReferenceTag) + json_literal(reference) + "\n";
  p += std::string(kGeneratedTag) + json_literal(caption) + "\n\n";
  p += "Reply with exactly one JSON object and no other text, in this shape:\n"
       "{\"hallucinated\": true|false, \"types\": [<labels>], \"spans\": [{\"text\": \"<exact quote from "
       "GENERATED>\", \"type\": \"<label>\", \"why\": \"<one line>\"}]}\n"
       "Use \"types\": [] and \"spans\": [] when nothing is unsupported.\n";
  return p;
}

JudgePromptFields extract_prompt_fields(std::string_view prompt) {
  JudgePromptFields out;
  bool have_ref = false, have_gen = false;
  std::size_t pos = 0;
  while (pos < prompt.size()) {
    auto end = prompt.find('\n', pos);
    if (end == std::string_view::npos) end = prompt.size();
    const auto line = prompt.substr(pos, end - pos);
    auto take = [&](std::string_view tag, std::string& into, bool& seen) {
      if (!seen && line.substr(0, tag.size()) == tag) {
        into = json::parse(line.substr(tag.size())).get<std::string>();
        seen = true;
      }
    };
    take(kReferenceTag, out.reference, have_ref);
    take(kGeneratedTag, out.caption, have_gen);
    pos = end + 1;
  }
  if (!have_ref || !have_gen) throw Error(ErrorCode::kFormat, "prompt lacks REFERENCE/GENERATED lines");
  return out;
}

JudgeVerdict parse_verdict(std::string_view raw, std::string_view caption) {
  const auto obj = first_json_object(raw);
  if (!obj) throw Error(ErrorCode::kNoJson, "judge reply contains no JSON object");
  const json& j = *obj;

  JudgeVerdict v;
  v.raw_response = std::string(raw);

  if (!j.contains("types") || !j["types"].is_array()) {
    throw Error(ErrorCode::kSchema, "verdict needs a 'types' array");
  }
  for (const auto& t : j["types"]) v.types.insert(require_label(t, "types[]"));

  if (j.contains("spans")) {
    if (!j["spans"].is_array()) throw Error(ErrorCode::kSchema, "'spans' must be an array");
    for (const auto& s : j["spans"]) {
      if (!s.is_object() || !s.contains("text") || !s["text"].is_string() || !s.contains("type")) {
        throw Error(ErrorCode::kSchema, "each span needs string 'text' and 'type'");
      }
      VerdictSpan span;
      span.text = trim(s["text"].get<std::string>());
      span.type = require_label(s["type"], "spans[].type");
      if (s.contains("why") && s["why"].is_string()) span.why = s["why"].get<std::string>();
      if (span.text.empty() || caption.find(span.text) == std::string_view::npos) {
        throw Error(ErrorCode::kSpanNotFound, fmt::format("span '{}' is not in the caption", span.text));
      }
      if (!v.types.contains(span.type)) {
        v.types.insert(span.type);
        v.warnings.push_back(fmt::format("span type '{}' missing from types; added", label(span.type)));
      }
      v.spans.push_back(std::move(span));
    }
  }

  v.hallucinated = !v.types.empty();
  if (j.contains("hallucinated")) {
    if (!j["hallucinated"].is_boolean()) throw Error(ErrorCode::kSchema, "'hallucinated' must be a boolean");
    if (j["hallucinated"].get<bool>() != v.hallucinated) {
      v.warnings.push_back(fmt::format("hallucinated={} contradicts types; normalized to {}",
                                       j["hallucinated"].get<bool>(), v.hallucinated));
    }
  }
  return v;
}

JudgeOutcome judge(const BenchmarkRecord& sample, const GenerationResult& generation, Backend& backend) {
  const std::string prompt = build_judge_prompt(generation.caption, sample.reference);
  auto request = judge_request(sample.id, prompt);

  JudgeOutcome outcome;
  outcome.sample_id = sample.id;
  const std::string model = backend.config().model.empty() ? backend.config().name : backend.config().model;

  for (int ask = 1; ask <= 2; ++ask) {
    outcome.asks = ask;
    const std::string raw = complete_text(request, backend);
    try {
      JudgeVerdict v = parse_verdict(raw, generation.caption);
      v.sample_id = sample.id;
      v.judge_model = model;
      for (const auto& w : v.warnings) spdlog::warn("judge verdict for {}: {}", sample.id, w);
      outcome.verdict = std::move(v);
      outcome.error.clear();
      return outcome;
    } catch (const Error& e) {
      if (!is_parse_error(e.code())) throw;
      outcome.error = e.what();
      request.messages.push_back({"assistant", {ContentPart::Text(raw)}});
      request.messages.push_back(
          {"user", {ContentPart::Text(fmt::format(
                       "Your reply could not be used ({}). Reply again with only the JSON object described "
                       "above; quote spans exactly from GENERATED and use only the four labels.",
                       e.what()))}});
    }
  }
  spdlog::warn("sample {} is unjudgeable: {}", sample.id, outcome.error);
  return outcome;
}

json outcome_to_json(const JudgeOutcome& outcome) {
  json j{{"sample_id", outcome.sample_id}, {"asks", outcome.asks}};
  if (!outcome.verdict) {
    j["status"] = "unjudgeable";
    j["error"] = outcome.error;
    return j;
  }
  const auto& v = *outcome.verdict;
  json types = json::array();
  for (auto t : v.types) types.push_back(label(t));
  json spans = json::array();
  for (const auto& s : v.spans) spans.push_back({{"text", s.text}, {"type", label(s.type)}, {"why", s.why}});
  j["status"] = "judged";
  j["hallucinated"] = v.hallucinated;
  j["types"] = std::move(types);
  j["spans"] = std::move(spans);
  j["judge_model"] = v.judge_model;
  j["raw_response"] = v.raw_response;
  j["warnings"] = v.warnings;
  return j;
}

JudgeOutcome outcome_from_json(const json& j) {
  JudgeOutcome o;
  o.sample_id = j.at("sample_id").get<std::string>();
  o.asks = j.value("asks", 1);
  if (j.at("status").get<std::string>() == "unjudgeable") {
    o.error = j.value("error", "");
    return o;
  }
  JudgeVerdict v;
  v.sample_id = o.sample_id;
  for (const auto& t : j.at("types")) v.types.insert(require_label(t, "types[]"));
  for (const auto& s : j.value("spans", json::array())) {
    v.spans.push_back({s.at("text").get<std::string>(), require_label(s.at("type"), "spans[].type"),
                       s.value("why", "")});
  }
  v.hallucinated = !v.types.empty();
  v.judge_model = j.value("judge_model", "");
  v.raw_response = j.value("raw_response", "");
  v.warnings = j.value("warnings", std::vector<std::string>{});
  o.verdict = std::move(v);
  return o;
}

}  // namespace naicl
