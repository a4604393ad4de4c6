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

#include "naicl/pipeline.h"

#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "naicl/acoustic_embed.h"
#include "naicl/bounded_pool.h"
#include "naicl/error.h"
#include "naicl/prior_index.h"
#include "naicl/prior_library.h"

namespace naicl {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename T, typename Parse>
std::vector<T> read_jsonl(const fs::path& path, Parse parse) {
  std::vector<T> out;
  std::ifstream is(path);
  if (!is) return out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      if (is.peek() == std::char_traits<char>::eof()) {
        spdlog::warn("{}: ignoring torn final line", path.string());
        break;
      }
      throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename ToJson>
void write_jsonl(const fs::path& path, const std::vector<T>& items, ToJson to_json_fn) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    for (const auto& item : items) os << to_json_fn(item).dump() << '\n';
  }
  fs::rename(tmp, path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc | std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << text;
}

// Appends one JSON line per call; used for checkpointing while a stage runs.
class JsonlAppender {
 public:
  explicit JsonlAppender(const fs::path& path) : os_(path, std::ios::app) {
    if (!os_) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  }
  void append(const json& j) {
    std::lock_guard lock(mutex_);
    os_ << j.dump() << '\n';
    os_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream os_;
};

fs::path resolve_against(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

}  // namespace

KeywordSets KeywordFiles::load() const {
  if (empty()) return KeywordSets::defaults();
  const auto& d = KeywordSets::defaults();
  KeywordSets sets{event.empty() ? d.event : load_keyword_file(event),
                   definite.empty() ? d.definite : load_keyword_file(definite),
                   acoustic.empty() ? d.acoustic : load_keyword_file(acoustic)};
  sets.validate();
  return sets;
}

json RunConfig::snapshot() const {
  json kw{{"event", keywords.event.empty() ? "builtin" : keywords.event.generic_string()},
                {"definite", keywords.definite.empty() ? "builtin" : keywords.definite.generic_string()},
                {"acoustic", keywords.acoustic.empty() ? "builtin" : keywords.acoustic.generic_string()}};
  return json{{"run_id", run_id},
              {"manifest", manifest.generic_string()},
              {"audio_root", audio_root ? audio_root->generic_string() : ""},
              {"library", library.generic_string()},
              {"icl_pool", icl_pool.generic_string()},
              {"variant", variant.to_json()},
              {"generator", generator.snapshot()},
              {"judge", judge.snapshot()},
              {"judge_prompt_version", kJudgePromptVersion},
              {"keywords", kw},
              {"stemming", stemming},
              {"seed", seed},
              {"abort_threshold", abort_threshold}};
}

json CaptionRecord::to_json() const {
  if (result) {
    return json{{"sample_id", sample_id},
                {"status", "ok"},
                {"caption", result->caption},
                {"backend", result->backend},
                {"attempt", result->attempt},
                {"latency_ms", result->latency_ms},
                {"exemplar_ids", exemplar_ids}};
  }
  return json{{"sample_id", sample_id},
              {"status", "failed"},
              {"code", to_string(code)},
              {"error", error},
              {"exemplar_ids", exemplar_ids}};
}

CaptionRecord CaptionRecord::from_json(const json& j) {
  CaptionRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.exemplar_ids = j.value("exemplar_ids", std::vector<std::string>{});
  if (j.value("status", "ok") == "ok") {
    GenerationResult g;
    g.sample_id = r.sample_id;
    g.caption = j.at("caption").get<std::string>();
    g.backend = j.value("backend", "");
    g.attempt = j.value("attempt", 1);
    g.latency_ms = j.value("latency_ms", std::int64_t{0});
    r.result = std::move(g);
  } else {
    r.error = j.value("error", "");
  }
  return r;
}

std::vector<CaptionRecord> read_captions(const fs::path& path) {
  return read_jsonl<CaptionRecord>(path, CaptionRecord::from_json);
}

std::vector<JudgeOutcome> read_verdicts(const fs::path& path) {
  return read_jsonl<JudgeOutcome>(path, outcome_from_json);
}

EvaluationReport compute_report(const std::vector<CaptionRecord>& captions,
                                const std::vector<JudgeOutcome>& outcomes, const KeywordSets& sets,
                                bool stemming) {
  EvaluationReport r;
  r.stemming = stemming;
  r.n_samples = captions.size();
  std::vector<std::string> texts;
  for (const auto& c : captions) {
    if (c.result) {
      texts.push_back(c.result->caption);
    } else {
      ++r.generation_failures;
    }
  }
  for (const auto& o : outcomes) {
    if (o.unjudgeable()) {
      ++r.unjudgeable;
    } else {
      ++r.n_judged;
    }
  }
  if (!texts.empty()) r.freq = keyword_frequency(texts, sets, stemming);
  if (r.n_judged > 0) {
    r.hr_percent = hallucination_rate(outcomes);
    r.type_rates = type_rates(outcomes);
  }
  return r;
}

std::vector<JudgeOutcome> judge_captions(const std::vector<CaptionRecord>& captions, const Benchmark& bench,
                                         Backend& backend, std::size_t concurrency, const fs::path& out) {
  std::vector<const CaptionRecord*> todo;
  for (const auto& c : captions) {
    if (c.result) todo.push_back(&c);
  }
  std::vector<std::optional<JudgeOutcome>> slots(todo.size());
  const auto limit = static_cast<std::size_t>(backend.config().limits.max_concurrency);
  for_each_bounded(todo.size(), std::min(concurrency, limit), [&](std::size_t i) {
    const auto* record = bench.find(todo[i]->sample_id);
    if (!record) {
      spdlog::error("captions mention unknown sample '{}'", todo[i]->sample_id);
      return;
    }
    try {
      slots[i] = judge(*record, *todo[i]->result, backend);
    } catch (const std::exception& e) {
      spdlog::error("judging {} failed: {}", todo[i]->sample_id, e.what());
    }
  });
  std::vector<JudgeOutcome> outcomes;
  for (auto& s : slots) {
    if (s) outcomes.push_back(std::move(*s));
  }
  if (!out.empty()) write_jsonl(out, outcomes, outcome_to_json);
  return outcomes;
}

RunSummary run_pipeline(const RunConfig& config) {
  if (config.out_dir.empty()) throw UsageError("run needs an output directory");
  if (config.concurrency < 1) throw UsageError("concurrency must be >= 1");
  config.generator.validate();
  config.judge.validate();

  ManifestOptions mopts;
  mopts.audio_root = config.audio_root;
  const Benchmark bench = load_manifest(config.manifest, mopts);
  if (bench.records.empty()) throw Error(ErrorCode::kEmpty, "benchmark manifest has no records");
  const KeywordSets sets = config.keywords.load();

  const Variant variant = config.variant.variant;
  std::optional<PriorLibrary> library;
  std::optional<PriorIndex> index;
  if (variant == Variant::kNaiclRetrieval || variant == Variant::kNaiclFixed) {
    if (config.library.empty()) throw UsageError("this variant needs --lib");
    library = load_library(config.library);
    if (variant == Variant::kNaiclRetrieval) index = PriorIndex::build(*library);
  }
  Benchmark pool;
  if (variant == Variant::kIclRealAudio) {
    if (config.icl_pool.empty()) throw UsageError("icl_real_audio needs a held-out --icl-pool manifest");
    pool = load_manifest(config.icl_pool);
    for (const auto& r : pool.records) {
      if (bench.find(r.id)) {
        throw Error(ErrorCode::kLeakage, "held-out pool record '" + r.id + "' is also under evaluation");
      }
    }
  }
  const PromptPlan plan =
      plan_variant(config.variant, library ? &*library : nullptr, pool.records, pool.audio_root);

  fs::create_directories(config.out_dir);
  const fs::path captions_path = config.out_dir / kCaptionsFile;
  const fs::path verdicts_path = config.out_dir / kVerdictsFile;

  std::map<std::string, CaptionRecord> captions;
  std::map<std::string, JudgeOutcome> verdicts;
  if (config.resume) {
    for (auto& c : read_captions(captions_path)) {
      if (c.result) captions[c.sample_id] = std::move(c);
    }
    for (auto& v : read_verdicts(verdicts_path)) {
      if (captions.contains(v.sample_id)) verdicts[v.sample_id] = std::move(v);
    }
    spdlog::info("resume: {} captions and {} verdicts already on disk", captions.size(), verdicts.size());
  } else {
    fs::remove(captions_path);
    fs::remove(verdicts_path);
  }
  // Rewrite the surviving checkpoint so appends below extend a clean file.
  {
    std::vector<CaptionRecord> kept;
    std::vector<JudgeOutcome> kept_v;
    for (const auto& r : bench.records) {
      if (auto it = captions.find(r.id); it != captions.end()) kept.push_back(it->second);
      if (auto it = verdicts.find(r.id); it != verdicts.end()) kept_v.push_back(it->second);
    }
    write_jsonl(captions_path, kept, [](const CaptionRecord& c) { return c.to_json(); });
    write_jsonl(verdicts_path, kept_v, outcome_to_json);
  }

  // Assemble requests for samples without a caption.
  std::vector<const BenchmarkRecord*> pending;
  for (const auto& r : bench.records) {
    if (!captions.contains(r.id)) pending.push_back(&r);
  }
  std::vector<std::optional<AssembledRequest>> requests(pending.size());
  std::vector<std::string> assembly_errors(pending.size());
  std::vector<ErrorCode> assembly_codes(pending.size(), ErrorCode::kInvalidArgument);
  for_each_bounded(pending.size(), config.concurrency, [&](std::size_t i) {
    const auto& sample = *pending[i];
    try {
      const fs::path audio = bench.resolve(sample);
      std::optional<RetrievalContext> ctx;
      if (index) {
        const Embedding query = embed_file(audio, index->embedder());
        ctx = index->retrieve(query, plan.shots(), sample.id);
      }
      requests[i] = assemble(sample, audio, plan, ctx ? &*ctx : nullptr);
    } catch (const Error& e) {
      assembly_errors[i] = e.what();
      assembly_codes[i] = e.code();
    } catch (const std::exception& e) {
      assembly_errors[i] = e.what();
    }
  });

  std::vector<AssembledRequest> ready;
  std::vector<std::size_t> ready_slot;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (requests[i]) {
      ready.push_back(std::move(*requests[i]));
      ready_slot.push_back(i);
    }
  }

  RunSummary summary;
  std::map<std::string, CaptionRecord> failed_captions;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (!requests[i]) {
      CaptionRecord rec{pending[i]->id, std::nullopt, {}, assembly_codes[i], assembly_errors[i]};
      failed_captions[rec.sample_id] = rec;
    }
  }

  auto generator = make_backend(config.generator);
  const BatchOutcome batch = generate_batch(ready, *generator, config.concurrency);
  {
    JsonlAppender append(captions_path);
    for (std::size_t j = 0; j < ready.size(); ++j) {
      CaptionRecord rec;
      rec.sample_id = ready[j].sample_id;
      rec.exemplar_ids = ready[j].exemplar_ids;
      if (batch.results[j]) {
        rec.result = *batch.results[j];
        append.append(rec.to_json());
        captions[rec.sample_id] = std::move(rec);
      }
    }
  }
  for (const auto& f : batch.failures) {
    CaptionRecord rec{f.sample_id, std::nullopt, ready[f.index].exemplar_ids, f.code, f.message};
    failed_captions[rec.sample_id] = rec;
  }

  // Judge captions that have no verdict yet.
  auto judge_backend = make_backend(config.judge);
  std::vector<const CaptionRecord*> to_judge;
  for (const auto& r : bench.records) {
    if (auto it = captions.find(r.id); it != captions.end() && !verdicts.contains(r.id)) {
      to_judge.push_back(&it->second);
    }
  }
  std::vector<std::optional<JudgeOutcome>> judged(to_judge.size());
  std::vector<std::string> judge_errors(to_judge.size());
  {
    JsonlAppender append(verdicts_path);
    const auto limit = static_cast<std::size_t>(config.judge.limits.max_concurrency);
    for_each_bounded(to_judge.size(), std::min(config.concurrency, limit), [&](std::size_t i) {
      try {
        judged[i] = judge(*bench.find(to_judge[i]->sample_id), *to_judge[i]->result, *judge_backend);
        append.append(outcome_to_json(*judged[i]));
      } catch (const std::exception& e) {
        judge_errors[i] = e.what();
      }
    });
  }
  std::size_t judge_failures = 0;
  for (std::size_t i = 0; i < to_judge.size(); ++i) {
    if (judged[i]) {
      verdicts[to_judge[i]->sample_id] = std::move(*judged[i]);
    } else {
      ++judge_failures;
      summary.failures.push_back(to_judge[i]->sample_id + ": judge: " + judge_errors[i]);
    }
  }

  // Final, manifest-ordered artifacts.
  std::vector<CaptionRecord> all_captions;
  std::vector<JudgeOutcome> all_verdicts;
  for (const auto& r : bench.records) {
    if (auto it = captions.find(r.id); it != captions.end()) {
      all_captions.push_back(it->second);
    } else if (auto ft = failed_captions.find(r.id); ft != failed_captions.end()) {
      all_captions.push_back(ft->second);
      summary.failures.push_back(r.id + ": generate: " + ft->second.error);
    }
    if (auto it = verdicts.find(r.id); it != verdicts.end()) all_verdicts.push_back(it->second);
  }
  write_jsonl(captions_path, all_captions, [](const CaptionRecord& c) { return c.to_json(); });
  write_jsonl(verdicts_path, all_verdicts, outcome_to_json);

  EvaluationReport report = compute_report(all_captions, all_verdicts, sets, config.stemming);
  report.judge_failures = judge_failures;
  report.run_id = config.run_id.empty() ? config.variant.name : config.run_id;
  report.variant = config.variant.to_json();
  report.config_snapshot = config.snapshot();
  report.config_snapshot["run_id"] = report.run_id;
  write_text(config.out_dir / kReportJsonFile, render_report(report, ReportFormat::kJson));
  write_text(config.out_dir / kReportMarkdownFile, render_report(report, ReportFormat::kMarkdown));

  const std::size_t failures = report.generation_failures + judge_failures;
  const double rate = static_cast<double>(failures) / static_cast<double>(bench.records.size());
  if (report.n_judged == 0 || rate > config.abort_threshold) {
    summary.exit_code = kExitFailure;
  } else if (failures > 0) {
    summary.exit_code = kExitPartial;
  }
  for (const auto& f : summary.failures) spdlog::warn("{}", f);
  summary.report = std::move(report);
  return summary;
}

json AblationSummary::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) rows_json.push_back(r.to_json());
  json failed_json = json::array();
  for (const auto& [name, error] : failed) failed_json.push_back({{"name", name}, {"error", error}});
  return json{{"schema_version", kReportSchemaVersion}, {"rows", rows_json}, {"failed_variants", failed_json}};
}

AblationSummary run_ablation(const RunConfig& base, const fs::path& matrix_file) {
  json matrix;
  try {
    matrix = json::parse(read_file(matrix_file));
  } catch (const json::exception& e) {
    throw UsageError("variant matrix " + matrix_file.string() + " is not valid JSON: " + e.what());
  }
  if (matrix.is_object() && matrix.contains("rows")) matrix = matrix["rows"];
  if (!matrix.is_array() || matrix.empty()) throw UsageError("variant matrix has no rows");

  const fs::path matrix_dir = matrix_file.parent_path();
  AblationSummary summary;
  bool any_partial = false;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const json& row = matrix[i];
    RunConfig cfg = base;
    std::string name = fmt::format("row{}", i);
    try {
      cfg.variant = VariantConfig::from_json(row, base.variant);
      if (!row.contains("name")) cfg.variant.name = std::string(to_string(cfg.variant.variant));
      name = cfg.variant.name;
      if (row.contains("library")) cfg.library = resolve_against(matrix_dir, row["library"].get<std::string>());
      if (row.contains("icl_pool")) cfg.icl_pool = resolve_against(matrix_dir, row["icl_pool"].get<std::string>());
      cfg.run_id = name;
      cfg.out_dir = base.out_dir / fmt::format("{:02d}-{}", i, name);
      auto result = run_pipeline(cfg);
      if (result.exit_code == kExitFailure) {
        summary.failed.emplace_back(name, "run exceeded the failure threshold");
      } else {
        any_partial = any_partial || result.exit_code == kExitPartial;
      }
      summary.rows.push_back(std::move(result.report));
    } catch (const std::exception& e) {
      spdlog::error("variant '{}' failed: {}", name, e.what());
      summary.failed.emplace_back(name, e.what());
    }
  }

  fs::create_directories(base.out_dir);
  write_text(base.out_dir / "ablation.json", summary.to_json().dump(2) + "\n");
  std::string md = render_markdown(summary.rows);
  if (!summary.failed.empty()) {
    md += "\nFailed variants:\n";
    for (const auto& [name, error] : summary.failed) md += fmt::format("- {}: {}\n", name, error);
  }
  write_text(base.out_dir / "ablation.md", md);

  if (summary.rows.empty()) {
    summary.exit_code = kExitFailure;
  } else if (!summary.failed.empty() || any_partial) {
    summary.exit_code = kExitPartial;
  }
  return summary;
}

}  // namespace naicl
