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

#include "naicl/context_builder.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "naicl/error.h"
#include "naicl/wav.h"

namespace naicl {

using nlohmann::json;

namespace {

constexpr double kDurationMatchS = 1e-6;

void check_library_duration(const PriorLibrary& library, double duration_s) {
  for (const auto& e : library.entries) {
    if (std::abs(e.spec.duration_s - duration_s) > kDurationMatchS) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("plan expects {} s noise but library entry '{}' lasts {} s", duration_s,
                              e.id, e.spec.duration_s));
    }
  }
}

}  // namespace

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kNaiclRetrieval: return "naicl_retrieval";
    case Variant::kNaiclFixed: return "naicl_fixed";
    case Variant::kIclRealAudio: return "icl_real_audio";
    case Variant::kBaselineNone: return "baseline_none";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  for (auto v : {Variant::kNaiclRetrieval, Variant::kNaiclFixed, Variant::kIclRealAudio,
                 Variant::kBaselineNone}) {
    if (to_string(v) == text) return v;
  }
  if (text == "baseline" || text == "none") return Variant::kBaselineNone;
  if (text == "icl-real" || text == "icl_real" || text == "icl") return Variant::kIclRealAudio;
  if (text == "naicl-fixed") return Variant::kNaiclFixed;
  if (text == "naicl" || text == "naicl-retrieval") return Variant::kNaiclRetrieval;
  throw Error(ErrorCode::kInvalidArgument, "unknown variant: " + std::string(text));
}

json VariantConfig::to_json() const {
  return json{{"name", name},
              {"variant", to_string(variant)},
              {"shots", shots},
              {"noise_duration_s", noise_duration_s},
              {"structured", structured},
              {"retrieval", variant == Variant::kNaiclRetrieval},
              {"text_only_shots", text_only_shots},
              {"instruction", instruction},
              {"fixed_ids", fixed_ids},
              {"temperature", decode.temperature},
              {"max_tokens", decode.max_tokens}};
}

VariantConfig VariantConfig::from_json(const json& j) { return from_json(j, VariantConfig{}); }

VariantConfig VariantConfig::from_json(const json& j, const VariantConfig& base) {
  VariantConfig c = base;
  c.name = j.value("name", c.name);
  if (j.contains("variant")) {
    const auto v = j.at("variant").get<std::string>();
    c.variant = parse_variant(v);
    if (v == "naicl" && j.contains("retrieval") && !j.at("retrieval").get<bool>()) {
      c.variant = Variant::kNaiclFixed;
    }
  }
  c.shots = j.value("shots", c.shots);
  c.noise_duration_s = j.value("noise_duration_s", c.noise_duration_s);
  c.structured = j.value("structured", c.structured);
  c.text_only_shots = j.value("text_only_shots", c.text_only_shots);
  c.instruction = j.value("instruction", c.instruction);
  c.fixed_ids = j.value("fixed_ids", c.fixed_ids);
  c.decode.temperature = j.value("temperature", c.decode.temperature);
  c.decode.max_tokens = j.value("max_tokens", c.decode.max_tokens);
  if (c.name.empty()) c.name = std::string(to_string(c.variant));
  return c;
}

PromptPlan plan_variant(const VariantConfig& config, const PriorLibrary* library,
                        std::span<const BenchmarkRecord> icl_pool,
                        const std::filesystem::path& icl_audio_root) {
  PromptPlan plan;
  plan.config = config;
  if (config.shots < 0) throw Error(ErrorCode::kInvalidArgument, "shots must be >= 0");
  if (config.instruction.empty()) throw Error(ErrorCode::kInvalidArgument, "instruction text is empty");

  switch (config.variant) {
    case Variant::kBaselineNone:
      plan.config.shots = 0;
      return plan;

    case Variant::kNaiclRetrieval: {
      if (config.shots < 1) throw Error(ErrorCode::kInvalidArgument, "naicl_retrieval needs shots >= 1");
      if (!library || !library->fully_embedded()) {
        throw Error(ErrorCode::kMissingEmbedding, "naicl_retrieval needs an embedded noise library");
      }
      if (static_cast<std::size_t>(config.shots) > library->entries.size()) {
        throw Error(ErrorCode::kOutOfRange,
                    fmt::format("{} shots requested from a {}-entry library", config.shots,
                                library->entries.size()));
      }
      check_library_duration(*library, config.noise_duration_s);
      return plan;
    }

    case Variant::kNaiclFixed: {
      if (config.fixed_ids.empty()) {
        throw Error(ErrorCode::kEmpty, "naicl_fixed needs a non-empty static exemplar list");
      }
      if (config.shots < 1 || static_cast<std::size_t>(config.shots) > config.fixed_ids.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("naicl_fixed asks for {} shots but the static list has {} ids",
                                config.shots, config.fixed_ids.size()));
      }
      if (!library) throw Error(ErrorCode::kInvalidArgument, "naicl_fixed needs a noise library");
      check_library_duration(*library, config.noise_duration_s);
      for (int i = 0; i < config.shots; ++i) {
        const auto* entry = library->find(config.fixed_ids[i]);
        if (!entry) {
          throw Error(ErrorCode::kInvalidArgument,
                      "static exemplar '" + config.fixed_ids[i] + "' is not in the library");
        }
        plan.exemplars.push_back(
            {entry->id, library->resolve(*entry), entry->description.rendered(config.structured), true});
      }
      return plan;
    }

    case Variant::kIclRealAudio: {
      if (config.shots < 1) throw Error(ErrorCode::kInvalidArgument, "icl_real_audio needs shots >= 1");
      if (icl_pool.size() < static_cast<std::size_t>(config.shots)) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("icl_real_audio asks for {} shots but the held-out pool has {} records",
                                config.shots, icl_pool.size()));
      }
      for (int i = 0; i < config.shots; ++i) {
        const auto& r = icl_pool[i];
        auto path = r.audio_path.is_absolute() ? r.audio_path : icl_audio_root / r.audio_path;
        plan.exemplars.push_back({r.id, std::move(path), r.reference, false});
      }
      return plan;
    }
  }
  return plan;
}

std::size_t AssembledRequest::audio_part_count() const {
  std::size_t n = 0;
  for (const auto& m : messages) {
    for (const auto& p : m.content) n += p.kind == ContentPart::Kind::kAudio;
  }
  return n;
}

AssembledRequest assemble(const BenchmarkRecord& sample, const std::filesystem::path& sample_audio,
                          const PromptPlan& plan, const RetrievalContext* ctx,
                          const AssembleOptions& options) {
  const bool wants_ctx = plan.variant() == Variant::kNaiclRetrieval;
  if (wants_ctx != (ctx != nullptr)) {
    throw Error(ErrorCode::kInvalidArgument,
                wants_ctx ? "naicl_retrieval needs a retrieval context"
                          : "a retrieval context was given to a non-retrieval variant");
  }

  std::vector<Exemplar> exemplars;
  if (ctx) {
    if (ctx->k != plan.shots() || ctx->hits.size() != plan.shots()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("retrieval context has k={} ({} hits), plan wants {} shots", ctx->k,
                              ctx->hits.size(), plan.shots()));
    }
    for (const auto& hit : ctx->hits) {
      exemplars.push_back({hit.entry_id, hit.audio_path, hit.description.rendered(plan.config.structured), true});
    }
  } else {
    exemplars = plan.exemplars;
  }
  if (exemplars.size() != plan.shots()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("plan has {} exemplars for {} shots", exemplars.size(), plan.shots()));
  }

  for (const auto& ex : exemplars) {
    if (!ex.is_noise && ex.id == sample.id) {
      throw Error(ErrorCode::kLeakage,
                  "real-audio exemplar '" + ex.id + "' is the sample under evaluation");
    }
    if (ex.is_noise && options.event_terms && options.event_terms->matches(ex.caption)) {
      const auto hits = options.event_terms->matched_terms(ex.caption);
      throw Error(ErrorCode::kForbiddenTerm,
                  fmt::format("noise exemplar '{}' caption contains event term '{}'", ex.id,
                              hits.empty() ? "" : hits.front()));
    }
    if (options.check_audio_exists && !plan.config.text_only_shots &&
        !std::filesystem::exists(ex.audio_path)) {
      throw Error(ErrorCode::kIo, "exemplar audio not found: " + ex.audio_path.string());
    }
  }
  if (options.check_audio_exists && !std::filesystem::exists(sample_audio)) {
    throw Error(ErrorCode::kIo, "sample audio not found: " + sample_audio.string());
  }

  AssembledRequest req;
  req.sample_id = sample.id;
  req.decode = plan.config.decode;
  for (const auto& ex : exemplars) {
    Message turn{"user", {}};
    if (!plan.config.text_only_shots) turn.content.push_back(ContentPart::Audio(ex.audio_path));
    turn.content.push_back(ContentPart::Text(ex.caption));
    req.messages.push_back(std::move(turn));
    req.exemplar_ids.push_back(ex.id);
  }
  req.messages.push_back(
      {"user", {ContentPart::Text(plan.config.instruction), ContentPart::Audio(sample_audio)}});
  return req;
}

json to_json(const AssembledRequest& request, AudioEncoding encoding) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    json parts = json::array();
    for (const auto& p : m.content) {
      if (p.kind == ContentPart::Kind::kText) {
        parts.push_back({{"type", "text"}, {"text", p.text}});
      } else if (encoding == AudioEncoding::kPath) {
        parts.push_back({{"type", "audio"}, {"path", p.audio.generic_string()}});
      } else {
        parts.push_back({{"type", "audio"}, {"format", "wav"}, {"data", base64_encode(read_file(p.audio))}});
      }
    }
    messages.push_back({{"role", m.role}, {"content", std::move(parts)}});
  }
  return json{{"sample_id", request.sample_id},
              {"messages", std::move(messages)},
              {"temperature", request.decode.temperature},
              {"max_tokens", request.decode.max_tokens},
              {"exemplar_ids", request.exemplar_ids}};
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace naicl
