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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "naicl/acoustic_embed.h"
#include "naicl/bench_dataset.h"
#include "naicl/error.h"
#include "naicl/noise_forge.h"
#include "naicl/pipeline.h"
#include "naicl/prior_index.h"
#include "naicl/prior_library.h"
#include "naicl/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct BackendFlags {
  std::string kind = "mock";
  std::string endpoint;
  std::string model;
  std::string fixture;
  std::string audit_log;
  int max_concurrency = 4;
  double timeout_s = 120.0;
  int retries = 3;
  int backoff_ms = 500;
  bool path_audio = false;

  void add(CLI::App* app, const std::string& role) {
    app->add_option("--" + role, kind, "Backend kind: mock or http")->capture_default_str();
    app->add_option("--" + role + "-endpoint", endpoint, "Chat endpoint URL");
    app->add_option("--" + role + "-model", model, "Model name sent with each request");
    app->add_option("--" + role + "-fixture", fixture, "Mock reply fixture (JSON)");
    app->add_option("--" + role + "-audit-log", audit_log, "Append requests and replies to this JSONL file");
    app->add_option("--" + role + "-max-concurrency", max_concurrency)->capture_default_str();
    app->add_option("--" + role + "-timeout", timeout_s, "Per-request timeout in seconds")->capture_default_str();
    app->add_option("--" + role + "-retries", retries)->capture_default_str();
    app->add_option("--" + role + "-backoff-ms", backoff_ms)->capture_default_str();
    app->add_flag("--" + role + "-path-audio", path_audio, "Send audio file paths instead of base64 data");
  }

  naicl::BackendConfig build(const std::string& role, const char* key_env) const {
    naicl::BackendConfig c;
    c.name = role;
    c.kind = naicl::parse_backend_kind(kind);
    c.endpoint = endpoint;
    c.model = model;
    c.api_key_env = key_env;
    c.limits = {max_concurrency, timeout_s, retries, backoff_ms};
    c.inline_audio = !path_audio;
    c.audit_log = audit_log;
    c.mock_fixture = fixture;
    return c;
  }
};

struct EmbedderFlags {
  std::string kind = std::string(naicl::kBuiltinSpectralKind);
  std::string endpoint;
  int mel_bands = 64;
  int dim = 0;
  double timeout_s = 30.0;
  int retries = 2;

  void add(CLI::App* app) {
    app->add_option("--embedder", kind, "builtin_spectral or external")->capture_default_str();
    app->add_option("--embedder-endpoint", endpoint, "Embedding service base URL");
    app->add_option("--mel-bands", mel_bands)->capture_default_str();
    app->add_option("--embed-dim", dim, "Expected embedding dimension (external)");
    app->add_option("--embedder-timeout", timeout_s)->capture_default_str();
    app->add_option("--embedder-retries", retries)->capture_default_str();
  }

  naicl::EmbedderConfig build() const {
    naicl::EmbedderConfig c;
    c.kind = kind;
    c.mel_bands = mel_bands;
    c.endpoint = endpoint;
    c.timeout_s = timeout_s;
    c.retries = retries;
    c.expected_dim = dim > 0 ? dim : 2 * mel_bands;
    c.validate();
    return c;
  }
};

struct KeywordFlags {
  std::string event, definite, acoustic;
  bool stem = false;

  void add(CLI::App* app) {
    app->add_option("--event-terms", event, "Event keyword file")->check(CLI::ExistingFile);
    app->add_option("--definite-terms", definite, "Definite keyword file")->check(CLI::ExistingFile);
    app->add_option("--acoustic-terms", acoustic, "Acoustic keyword file")->check(CLI::ExistingFile);
    app->add_flag("--stem", stem, "Apply light suffix stemming before matching");
  }

  naicl::KeywordFiles files() const { return {event, definite, acoustic}; }
};

struct RunFlags {
  std::string manifest, audio_root, library, icl_pool, out, run_id;
  std::string variant = "naicl";
  std::string retrieval = "on";
  int shots = 3;
  double noise_duration = 2.0;
  bool unstructured = false;
  bool text_only = false;
  std::vector<std::string> fixed_ids;
  std::string instruction = std::string(naicl::kDefaultInstruction);
  int max_tokens = 256;
  std::size_t concurrency = 4;
  bool resume = false;
  std::uint64_t seed = 7;
  double abort_threshold = naicl::kDefaultAbortThreshold;
  BackendFlags generator, judge;
  KeywordFlags keywords;

  void add(CLI::App* app, bool with_variant) {
    app->add_option("--manifest", manifest, "Benchmark manifest (JSONL)")->required()->check(CLI::ExistingFile);
    app->add_option("--audio-root", audio_root, "Directory that audio paths are relative to");
    app->add_option("--lib", library, "Noise prior library directory");
    app->add_option("--icl-pool", icl_pool, "Held-out manifest of real-audio exemplars");
    app->add_option("--out", out, "Output directory")->required();
    app->add_option("--run-id", run_id, "Report row label (default: variant name)");
    if (with_variant) {
      app->add_option("--variant", variant, "naicl, icl-real or baseline")->capture_default_str();
      app->add_option("--retrieval", retrieval, "on or off (naicl only)")
          ->check(CLI::IsMember({"on", "off"}))
          ->capture_default_str();
      app->add_option("--shots", shots)->capture_default_str();
      app->add_option("--noise-duration", noise_duration, "Noise exemplar duration (s)")->capture_default_str();
      app->add_flag("--unstructured,!--structured", unstructured, "Use free-form noise descriptions");
      app->add_option("--fixed-ids", fixed_ids, "Library entry ids for the fixed variant");
    }
    app->add_flag("--text-only-shots", text_only, "Drop exemplar audio and keep captions");
    app->add_option("--instruction", instruction)->capture_default_str();
    app->add_option("--max-tokens", max_tokens)->capture_default_str();
    app->add_option("--concurrency", concurrency)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_flag("--resume", resume, "Reuse persisted captions and verdicts");
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--abort-threshold", abort_threshold, "Failure fraction that fails the run")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    generator.add(app, "generator");
    judge.add(app, "judge");
    keywords.add(app);
  }

  naicl::RunConfig build() const {
    naicl::RunConfig c;
    c.run_id = run_id;
    c.manifest = manifest;
    if (!audio_root.empty()) c.audio_root = fs::path(audio_root);
    c.library = library;
    c.icl_pool = icl_pool;
    naicl::Variant v = naicl::parse_variant(variant);
    if (v == naicl::Variant::kNaiclRetrieval && retrieval == "off") v = naicl::Variant::kNaiclFixed;
    c.variant.variant = v;
    c.variant.name = std::string(naicl::to_string(v));
    c.variant.shots = shots;
    c.variant.noise_duration_s = noise_duration;
    c.variant.structured = !unstructured;
    c.variant.text_only_shots = text_only;
    c.variant.instruction = instruction;
    c.variant.fixed_ids = fixed_ids;
    c.variant.decode.max_tokens = max_tokens;
    c.generator = generator.build("generator", "NAICL_GENERATOR_KEY");
    c.judge = judge.build("judge", "NAICL_JUDGE_KEY");
    c.keywords = keywords.files();
    c.stemming = keywords.stem;
    c.seed = seed;
    c.abort_threshold = abort_threshold;
    c.out_dir = out;
    c.concurrency = concurrency;
    c.resume = resume;
    return c;
  }
};

void print_table(const naicl::RetrievalContext& ctx) {
  std::cout << fmt::format("{:<4} {:<32} {:>10}  {}\n", "rank", "entry", "cosine", "description");
  for (std::size_t i = 0; i < ctx.hits.size(); ++i) {
    const auto& h = ctx.hits[i];
    std::cout << fmt::format("{:<4} {:<32} {:>10.6f}  {}\n", i + 1, h.entry_id, h.similarity,
                             h.description.rendered_structured);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"naicl: noise-prior in-context captioning and hallucination evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  // build-library
  auto* build = app.add_subcommand("build-library", "Synthesize the noise prior library");
  std::string build_out, recipe = "default";
  std::uint64_t build_seed = 7;
  double build_duration = 2.0;
  bool no_embed = false;
  EmbedderFlags build_embedder;
  build->add_option("--out", build_out, "Library output directory")->required();
  build->add_option("--recipe", recipe, "default or grid")->capture_default_str();
  build->add_option("--seed", build_seed)->capture_default_str();
  build->add_option("--duration", build_duration, "Clip duration (s)")->capture_default_str();
  build->add_flag("--no-embed", no_embed, "Skip the embedding sidecar");
  build_embedder.add(build);

  // embed
  auto* embed = app.add_subcommand("embed", "Embed every library entry and write the sidecar");
  std::string embed_lib;
  EmbedderFlags embed_embedder;
  embed->add_option("--lib", embed_lib)->required()->check(CLI::ExistingDirectory);
  embed_embedder.add(embed);

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Print the top-k library entries for one clip");
  std::string retrieve_audio, retrieve_lib;
  std::size_t retrieve_k = naicl::kDefaultTopK;
  bool retrieve_json = false;
  retrieve->add_option("--audio", retrieve_audio)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--lib", retrieve_lib)->required()->check(CLI::ExistingDirectory);
  retrieve->add_option("-k", retrieve_k)->capture_default_str();
  retrieve->add_flag("--json", retrieve_json, "Emit JSON instead of a table");

  // run
  auto* run = app.add_subcommand("run", "Generate, judge and score one variant");
  RunFlags run_flags;
  run_flags.add(run, true);

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run every row of a variant matrix");
  RunFlags ablate_flags;
  std::string matrix;
  ablate_flags.add(ablate, false);
  ablate->add_option("--matrix", matrix, "Variant matrix (JSON)")->required()->check(CLI::ExistingFile);

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "Judge an existing captions.jsonl");
  std::string judge_captions_path, judge_manifest, judge_audio_root, judge_out;
  std::size_t judge_concurrency = 4;
  BackendFlags judge_flags;
  judge_cmd->add_option("--captions", judge_captions_path)->required()->check(CLI::ExistingFile);
  judge_cmd->add_option("--manifest", judge_manifest, "Benchmark manifest with references")
      ->required()
      ->check(CLI::ExistingFile);
  judge_cmd->add_option("--audio-root", judge_audio_root);
  judge_cmd->add_option("--out", judge_out, "Verdicts file (default: verdicts.jsonl next to the captions)");
  judge_cmd->add_option("--concurrency", judge_concurrency)->capture_default_str()->check(CLI::PositiveNumber);
  judge_flags.add(judge_cmd, "judge");

  // stats
  auto* stats = app.add_subcommand("stats", "Duration, event-count and label histograms");
  std::string stats_manifest, stats_audio_root;
  bool stats_verify = false;
  stats->add_option("--manifest", stats_manifest)->required()->check(CLI::ExistingFile);
  stats->add_option("--audio-root", stats_audio_root);
  stats->add_flag("--verify-audio", stats_verify, "Check that every audio file exists");

  // report
  auto* report = app.add_subcommand("report", "Render report.json files as one table");
  std::vector<std::string> report_inputs;
  std::string report_format = "markdown";
  report->add_option("inputs", report_inputs, "report.json files or run directories")->required();
  report->add_option("--format", report_format)->check(CLI::IsMember({"markdown", "json"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? naicl::kExitOk : naicl::kExitUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_default_logger(spdlog::stderr_color_mt("naicl"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*build) {
      auto specs = naicl::recipe_by_name(recipe, build_duration, build_seed);
      auto lib = naicl::build_library(specs, build_out);
      if (!no_embed) naicl::embed_library(lib, build_embedder.build());
      spdlog::info("wrote {} entries to {}", lib.entries.size(), build_out);
      return naicl::kExitOk;
    }
    if (*embed) {
      auto lib = naicl::load_library(embed_lib);
      naicl::embed_library(lib, embed_embedder.build());
      spdlog::info("embedded {} entries", lib.entries.size());
      return naicl::kExitOk;
    }
    if (*retrieve) {
      const auto index = naicl::PriorIndex::load(retrieve_lib);
      const auto query = naicl::embed_file(retrieve_audio, index.embedder());
      const auto ctx = index.retrieve(query, retrieve_k, fs::path(retrieve_audio).stem().string());
      if (retrieve_json) {
        json hits = json::array();
        for (const auto& h : ctx.hits) {
          hits.push_back({{"entry_id", h.entry_id},
                          {"similarity", h.similarity},
                          {"description", h.description.rendered_structured}});
        }
        std::cout << json{{"query", ctx.query_id}, {"k", ctx.k}, {"hits", hits}}.dump(2) << '\n';
      } else {
        print_table(ctx);
      }
      return naicl::kExitOk;
    }
    if (*run) {
      const auto summary = naicl::run_pipeline(run_flags.build());
      std::cout << naicl::render_report(summary.report, naicl::ReportFormat::kMarkdown);
      return summary.exit_code;
    }
    if (*ablate) {
      const auto summary = naicl::run_ablation(ablate_flags.build(), matrix);
      std::cout << naicl::render_markdown(summary.rows);
      for (const auto& [name, error] : summary.failed) std::cerr << "failed: " << name << ": " << error << '\n';
      return summary.exit_code;
    }
    if (*judge_cmd) {
      naicl::ManifestOptions mopts;
      if (!judge_audio_root.empty()) mopts.audio_root = fs::path(judge_audio_root);
      const auto bench = naicl::load_manifest(judge_manifest, mopts);
      const auto captions = naicl::read_captions(judge_captions_path);
      auto backend = naicl::make_backend(judge_flags.build("judge", "NAICL_JUDGE_KEY"));
      const fs::path out = judge_out.empty()
                               ? fs::path(judge_captions_path).parent_path() / naicl::kVerdictsFile
                               : fs::path(judge_out);
      const auto outcomes = naicl::judge_captions(captions, bench, *backend, judge_concurrency, out);
      std::size_t ok = 0;
      for (const auto& c : captions) ok += c.result ? 1 : 0;
      spdlog::info("wrote {} verdicts to {}", outcomes.size(), out.string());
      return outcomes.size() == ok ? naicl::kExitOk : naicl::kExitPartial;
    }
    if (*stats) {
      naicl::ManifestOptions mopts;
      if (!stats_audio_root.empty()) mopts.audio_root = fs::path(stats_audio_root);
      mopts.verify_audio = stats_verify;
      const auto bench = naicl::load_manifest(stats_manifest, mopts);
      std::cout << naicl::dataset_stats(bench.records).to_json().dump(2) << '\n';
      return naicl::kExitOk;
    }
    if (*report) {
      std::vector<naicl::EvaluationReport> rows;
      for (const auto& in : report_inputs) {
        fs::path p = in;
        if (fs::is_directory(p)) p /= naicl::kReportJsonFile;
        rows.push_back(naicl::EvaluationReport::from_json(json::parse(naicl::read_file(p))));
      }
      if (report_format == "json") {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(r.to_json());
        std::cout << arr.dump(2) << '\n';
      } else {
        std::cout << naicl::render_markdown(rows);
      }
      return naicl::kExitOk;
    }
  } catch (const naicl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return naicl::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return naicl::kExitFailure;
  }
  return naicl::kExitUsage;
}
