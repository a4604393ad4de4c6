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

#include "naicl/metrics_core.h"

#include <fmt/format.h>

#include "naicl/error.h"

namespace naicl {

using nlohmann::json;

namespace {

template <typename VerdictRange, typename Get>
std::pair<std::size_t, std::array<std::size_t, 5>> tally(const VerdictRange& items, Get get) {
  std::size_t judged = 0;
  std::array<std::size_t, 5> counts{};  // [0..3] per type, [4] any
  for (const auto& item : items) {
    const JudgeVerdict* v = get(item);
    if (!v) continue;
    ++judged;
    if (!v->types.empty()) ++counts[4];
    for (std::size_t t = 0; t < kHallucinationTypes.size(); ++t) {
      if (v->types.contains(kHallucinationTypes[t])) ++counts[t];
    }
  }
  if (judged == 0) throw Error(ErrorCode::kEmpty, "no judged verdicts to aggregate");
  return {judged, counts};
}

const JudgeVerdict* from_outcome(const JudgeOutcome& o) { return o.verdict ? &*o.verdict : nullptr; }
const JudgeVerdict* from_verdict(const JudgeVerdict& v) { return &v; }

double percent(std::size_t part, std::size_t whole) {
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::array<double, 4> rates_from(std::size_t judged, const std::array<std::size_t, 5>& counts) {
  std::array<double, 4> out{};
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = percent(counts[t], judged);
  return out;
}

}  // namespace

double hallucination_rate(std::span<const JudgeOutcome> outcomes) {
  const auto [judged, counts] = tally(outcomes, from_outcome);
  return percent(counts[4], judged);
}

double hallucination_rate(std::span<const JudgeVerdict> verdicts) {
  const auto [judged, counts] = tally(verdicts, from_verdict);
  return percent(counts[4], judged);
}

std::array<double, 4> type_rates(std::span<const JudgeOutcome> outcomes) {
  const auto [judged, counts] = tally(outcomes, from_outcome);
  return rates_from(judged, counts);
}

std::array<double, 4> type_rates(std::span<const JudgeVerdict> verdicts) {
  const auto [judged, counts] = tally(verdicts, from_verdict);
  return rates_from(judged, counts);
}

KeywordCounts& KeywordCounts::operator+=(const KeywordCounts& other) {
  captions += other.captions;
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += other.hits[i];
  return *this;
}

double KeywordFrequencies::get(KeywordCategory category) const {
  switch (category) {
    case KeywordCategory::kEvent: return event;
    case KeywordCategory::kDefinite: return definite;
    case KeywordCategory::kAcoustic: return acoustic;
  }
  return 0.0;
}

KeywordCounts count_keywords(std::span<const std::string> captions, const KeywordSets& sets, bool stemming) {
  const std::array<KeywordMatcher, 3> matchers = {KeywordMatcher(sets.event, stemming),
                                                  KeywordMatcher(sets.definite, stemming),
                                                  KeywordMatcher(sets.acoustic, stemming)};
  KeywordCounts counts;
  counts.captions = captions.size();
  for (const auto& caption : captions) {
    const auto tokens = tokenize(caption, stemming);
    for (std::size_t k = 0; k < matchers.size(); ++k) {
      if (matchers[k].matches_tokens(tokens)) ++counts.hits[k];
    }
  }
  return counts;
}

KeywordFrequencies frequencies(const KeywordCounts& counts) {
  if (counts.captions == 0) throw Error(ErrorCode::kEmpty, "keyword frequency needs at least one caption");
  const auto n = static_cast<double>(counts.captions);
  return {static_cast<double>(counts.hits[0]) / n, static_cast<double>(counts.hits[1]) / n,
          static_cast<double>(counts.hits[2]) / n};
}

KeywordFrequencies keyword_frequency(std::span<const std::string> captions, const KeywordSets& sets,
                                     bool stemming) {
  if (captions.empty()) throw Error(ErrorCode::kEmpty, "keyword frequency needs at least one caption");
  return frequencies(count_keywords(captions, sets, stemming));
}

std::string EvaluationReport::row_label() const {
  if (variant.is_object() && variant.contains("name") && variant["name"].is_string() &&
      !variant["name"].get<std::string>().empty()) {
    return variant["name"].get<std::string>();
  }
  return run_id;
}

json EvaluationReport::to_json() const {
  json rates = json::object();
  for (std::size_t t = 0; t < kHallucinationTypes.size(); ++t) {
    rates[std::string(label(kHallucinationTypes[t]))] = type_rates[t];
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"run_id", run_id},
              {"variant", variant},
              {"n_samples", n_samples},
              {"n_judged", n_judged},
              {"unjudgeable", unjudgeable},
              {"generation_failures", generation_failures},
              {"judge_failures", judge_failures},
              {"hr_percent", hr_percent},
              {"type_rates", rates},
              {"freq", {{"event", freq.event}, {"definite", freq.definite}, {"acoustic", freq.acoustic}}},
              {"stemming", stemming},
              {"config_snapshot", config_snapshot}};
}

EvaluationReport EvaluationReport::from_json(const json& j) {
  if (j.value("schema_version", 0) != kReportSchemaVersion) {
    throw Error(ErrorCode::kFormat, "unsupported report schema version");
  }
  EvaluationReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.variant = j.at("variant");
  r.n_samples = j.at("n_samples").get<std::size_t>();
  r.n_judged = j.at("n_judged").get<std::size_t>();
  r.unjudgeable = j.at("unjudgeable").get<std::size_t>();
  r.generation_failures = j.at("generation_failures").get<std::size_t>();
  r.judge_failures = j.value("judge_failures", std::size_t{0});
  r.hr_percent = j.at("hr_percent").get<double>();
  for (std::size_t t = 0; t < kHallucinationTypes.size(); ++t) {
    r.type_rates[t] = j.at("type_rates").at(std::string(label(kHallucinationTypes[t]))).get<double>();
  }
  const auto& f = j.at("freq");
  r.freq = {f.at("event").get<double>(), f.at("definite").get<double>(), f.at("acoustic").get<double>()};
  r.stemming = j.value("stemming", false);
  r.config_snapshot = j.value("config_snapshot", json::object());
  return r;
}

std::string render_markdown(std::span<const EvaluationReport> rows) {
  std::string out =
      "| Variant | HR (%) | Acoustic Attribute (%) | Source (%) | Prior-Driven (%) | Fabricated (%) "
      "| Event | Definite | Acoustic | N | Unjudgeable |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += fmt::format("| {} | {:.{}f} |", r.row_label(), r.hr_percent, kRateDecimals);
    for (double rate : r.type_rates) out += fmt::format(" {:.{}f} |", rate, kRateDecimals);
    out += fmt::format(" {:.{}f} | {:.{}f} | {:.{}f} | {} | {} |\n", r.freq.event, kFrequencyDecimals,
                       r.freq.definite, kFrequencyDecimals, r.freq.acoustic, kFrequencyDecimals, r.n_judged,
                       r.unjudgeable);
  }
  return out;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report.to_json().dump(2) + "\n";
  return render_markdown(std::span<const EvaluationReport>(&report, 1));
}

}  // namespace naicl
