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

// Acceptance checks for the NAICL toolkit. Prints one PASS/FAIL line per
// criterion and exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "library_fixture.h"
#include "judge_fixtures.h"
#include "naicl/context_builder.h"
#include "naicl/error.h"
#include "naicl/judge_engine.h"
#include "naicl/keywords.h"
#include "naicl/metrics_core.h"
#include "naicl/noise_forge.h"
#include "naicl/prior_index.h"
#include "naicl/prior_library.h"
#include "naicl/wav.h"
#include "oracles.h"
#include "temp_dir.h"

namespace fs = std::filesystem;
using namespace naicl;

namespace {

// Tolerances.
constexpr double kSlopeToleranceDbPerOctave = 1.0;
constexpr double kSlopeLoHz = 50.0;
constexpr double kSlopeHiHz = 4000.0;
constexpr std::size_t kWelchSegment = 4096;
constexpr double kNoiseClipSeconds = 10.0;
constexpr int kNoiseSeeds = 200;
constexpr double kMinBandRejectionDb = 30.0;
constexpr double kBandGuardHz = 50.0;
constexpr double kNoiseBudgetS = 30.0;
constexpr int kRetrievalInstances = 100;
constexpr int kRetrievalQueries = 100;
constexpr std::size_t kRetrievalMaxLibrary = 2000;
constexpr std::size_t kRetrievalDim = 128;
constexpr double kRetrievalSimTolerance = 1e-12;
constexpr double kRetrievalBudgetS = 60.0;
constexpr int kMetricSamples = 200;
constexpr int kBoundTrials = 1000;
constexpr double kExpectedE2eHr = 30.00;
constexpr double kE2eBudgetS = 10.0;
constexpr std::size_t kAblationRows = 8;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

const std::array<std::string, 4> kLabelNames = {"acoustic_attribute", "source_material", "prior_driven",
                                                "fabricated_event"};

Outcome noise_spectra() {
  const auto t0 = Clock::now();
  const std::array<std::pair<NoiseColor, double>, 3> targets = {
      {{NoiseColor::kWhite, 0.0}, {NoiseColor::kPink, -3.0}, {NoiseColor::kBrown, -6.0}}};
  double worst = 0.0;
  std::string worst_case;
  for (const auto& [color, target] : targets) {
    for (int s = 0; s < kNoiseSeeds; ++s) {
      NoiseSpec spec;
      spec.color = color;
      spec.duration_s = kNoiseClipSeconds;
      spec.seed = 1000 + static_cast<std::uint64_t>(s);
      const auto audio = synthesize_noise(spec);
      const auto psd = oracle::welch_psd(audio.samples, kWelchSegment);
      const double slope =
          oracle::third_octave_slope(psd, spec.sample_rate_hz, kWelchSegment, kSlopeLoHz, kSlopeHiHz);
      const double dev = std::abs(slope - target);
      if (dev > worst) {
        worst = dev;
        worst_case = fmt::format("{} seed {} slope {:.3f}", to_string(color), spec.seed, slope);
      }
    }
  }
  std::set<std::pair<double, double>> bands;
  for (const auto& spec : default_recipe(50)) {
    if (spec.band) bands.insert({spec.band->low_hz, spec.band->high_hz});
  }
  double min_rejection = 1e300;
  for (const auto& [lo, hi] : bands) {
    NoiseSpec spec;
    spec.color = NoiseColor::kBandLimited;
    spec.band = Band{lo, hi};
    spec.duration_s = kNoiseClipSeconds;
    spec.seed = 42;
    const auto psd = oracle::welch_psd(synthesize_noise(spec).samples, kWelchSegment);
    min_rejection = std::min(
        min_rejection, oracle::band_rejection_db(psd, spec.sample_rate_hz, kWelchSegment, lo, hi, kBandGuardHz));
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst <= kSlopeToleranceDbPerOctave && bands.size() >= 5 &&
                  min_rejection >= kMinBandRejectionDb && elapsed < kNoiseBudgetS;
  return {ok, fmt::format("max slope deviation {:.3f} dB/oct ({}), {} bands, min rejection {:.1f} dB, {:.1f} s",
                          worst, worst_case, bands.size(), min_rejection, elapsed)};
}

Outcome retrieval_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t checks = 0, mismatches = 0;
  std::string first_mismatch;
  for (int inst = 0; inst < kRetrievalInstances; ++inst) {
    const std::size_t n = 5 + rng() % (kRetrievalMaxLibrary - 4);
    std::vector<std::vector<float>> rows;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      // Roughly a tenth of the rows duplicate an earlier row to force ties.
      if (i > 0 && rng() % 10 == 0) {
        rows.push_back(rows[rng() % i]);
      } else {
        rows.push_back(oracle::random_unit(rng, kRetrievalDim));
      }
      ids.push_back(fmt::format("e{:05d}", (i * 7919) % 100000));
    }
    const auto library = naicl::testing::library_from_rows(rows, ids);
    const auto index = PriorIndex::build(library);
    for (int q = 0; q < kRetrievalQueries; ++q) {
      // Every fourth query is a library row so the top hits tie exactly.
      const auto query = q % 4 == 0 ? rows[rng() % n] : oracle::random_unit(rng, kRetrievalDim);
      const Embedding emb{std::string(kBuiltinSpectralKind), query};
      for (std::size_t k = 1; k <= 5; ++k) {
        const auto got = index.retrieve(emb, k);
        const auto want = oracle::full_sort_topk(rows, ids, query, k);
        ++checks;
        bool same = got.hits.size() == want.size();
        for (std::size_t i = 0; same && i < want.size(); ++i) {
          same = got.hits[i].entry_id == want[i].id &&
                 std::abs(got.hits[i].similarity - want[i].sim) <= kRetrievalSimTolerance;
        }
        if (!same && mismatches++ == 0) first_mismatch = fmt::format(" first at instance {} k {}", inst, k);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < kRetrievalBudgetS,
          fmt::format("{} / {} top-k lists match{}, {:.1f} s", checks - mismatches, checks, first_mismatch, elapsed)};
}

std::set<HallucinationType> random_types(std::mt19937_64& rng, std::set<std::string>& names) {
  std::set<HallucinationType> types;
  std::bernoulli_distribution coin(0.25);
  for (std::size_t t = 0; t < 4; ++t) {
    if (coin(rng)) {
      types.insert(kHallucinationTypes[t]);
      names.insert(kLabelNames[t]);
    }
  }
  return types;
}

Outcome metric_oracle() {
  std::mt19937_64 rng(99);
  std::vector<JudgeVerdict> verdicts;
  std::vector<std::set<std::string>> labels;
  for (int i = 0; i < kMetricSamples; ++i) {
    std::set<std::string> names;
    JudgeVerdict v;
    v.types = random_types(rng, names);
    v.hallucinated = !v.types.empty();
    verdicts.push_back(v);
    labels.push_back(names);
  }
  const auto want = oracle::naive_rates(labels);
  bool exact = hallucination_rate(verdicts) == want.hr && type_rates(verdicts) == want.types;

  const auto& sets = KeywordSets::defaults();
  std::vector<std::string> vocab = {"static", "hum", "low", "steady", "noise", "with", "quiet", "bright"};
  for (const auto* v : {&sets.event, &sets.definite, &sets.acoustic}) {
    for (std::size_t i = 0; i < v->size(); i += 3) vocab.push_back((*v)[i]);
  }
  std::vector<std::string> captions;
  for (int i = 0; i < kMetricSamples; ++i) {
    std::string c;
    const int words = 3 + static_cast<int>(rng() % 8);
    for (int w = 0; w < words; ++w) c += (w ? " " : "") + vocab[rng() % vocab.size()];
    captions.push_back(c + ".");
  }
  const auto f = keyword_frequency(captions, sets);
  exact = exact && f.event == oracle::naive_frequency(captions, sets.event) &&
          f.definite == oracle::naive_frequency(captions, sets.definite) &&
          f.acoustic == oracle::naive_frequency(captions, sets.acoustic);

  int bound_violations = 0;
  for (int trial = 0; trial < kBoundTrials; ++trial) {
    std::vector<JudgeVerdict> vs(1 + rng() % 50);
    for (auto& v : vs) {
      std::set<std::string> unused;
      v.types = random_types(rng, unused);
      v.hallucinated = !v.types.empty();
    }
    const double hr = hallucination_rate(vs);
    const auto rates = type_rates(vs);
    double sum = 0, mx = 0;
    for (double r : rates) {
      sum += r;
      mx = std::max(mx, r);
    }
    if (mx > hr || hr > sum + 1e-9) ++bound_violations;
  }
  return {exact && bound_violations == 0,
          fmt::format("{} samples exact: {}, bound violations {}/{}", kMetricSamples, exact ? "yes" : "no",
                      bound_violations, kBoundTrials)};
}

Outcome keyword_fixture() {
  const std::vector<std::string> captions = {"a dog barks loudly", "continuous background noise"};
  const double half = keyword_frequency(captions, KeywordSets{{"barks"}, {}, {}}).event;
  const double none = keyword_frequency(captions, KeywordSets{{}, {}, {}}).event;
  return {half == 0.5 && none == 0.0, fmt::format("freq_event {:.4f}, empty set {:.4f}", half, none)};
}

void write_tone(const fs::path& path, double hz) {
  AudioBuffer audio;
  audio.samples.resize(32000);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    audio.samples[i] = static_cast<float>(0.3 * std::sin(2 * std::numbers::pi * hz * static_cast<double>(i) / 16000.0));
  }
  write_wav(path, audio);
}

// Copies the e2e fixture, writes its audio and builds both libraries.
bool prepare_e2e(const fs::path& cli, const fs::path& fixtures, const fs::path& dir, std::string& why) {
  fs::copy(fixtures / "e2e", dir, fs::copy_options::recursive);
  fs::create_directories(dir / "audio");
  for (int i = 0; i < 10; ++i) write_tone(dir / fmt::format("audio/s{:02d}.wav", i), 200.0 + 90.0 * i);
  for (int i = 0; i < 3; ++i) write_tone(dir / fmt::format("audio/p{:02d}.wav", i), 2500.0 + 300.0 * i);
  if (shell(fmt::format("{} build-library --out {}", quote(cli), quote(dir / "lib2s"))) != 0 ||
      shell(fmt::format("{} build-library --duration 10 --out {}", quote(cli), quote(dir / "lib10s"))) != 0) {
    why = "build-library failed";
    return false;
  }
  return true;
}

std::string mock_flags(const fs::path& dir) {
  return fmt::format("--manifest {} --icl-pool {} --generator-fixture {} --judge-fixture {}",
                     quote(dir / "bench.jsonl"), quote(dir / "icl_pool.jsonl"), quote(dir / "generator.json"),
                     quote(dir / "judge.json"));
}

Outcome end_to_end(const fs::path& cli, const fs::path& dir) {
  double max_run = 0.0;
  std::vector<std::string> reports;
  for (const auto& [name, conc] : std::vector<std::pair<std::string, int>>{{"c1", 1}, {"c8", 8}, {"c1b", 1}}) {
    const auto t0 = Clock::now();
    const int rc = shell(fmt::format("{} run {} --lib {} --concurrency {} --out {}", quote(cli), mock_flags(dir),
                                     quote(dir / "lib2s"), conc, quote(dir / name)));
    max_run = std::max(max_run, seconds_since(t0));
    if (rc != 0) return {false, fmt::format("run {} exited {}", name, rc)};
    reports.push_back(slurp(dir / name / "report.json"));
  }
  const auto report = EvaluationReport::from_json(nlohmann::json::parse(reports[0]));
  const bool identical = reports[0] == reports[1] && reports[0] == reports[2];
  const bool hr_ok = std::abs(report.hr_percent - kExpectedE2eHr) < 1e-9;
  return {identical && hr_ok && max_run < kE2eBudgetS,
          fmt::format("HR {:.2f}, reports byte-identical: {}, slowest run {:.2f} s", report.hr_percent,
                      identical ? "yes" : "no", max_run)};
}

Outcome ablation(const fs::path& cli, const fs::path& dir) {
  const int rc = shell(fmt::format("{} ablate {} --lib {} --matrix {} --out {}", quote(cli), mock_flags(dir),
                                   quote(dir / "lib2s"), quote(dir / "ablation_matrix.json"), quote(dir / "abl")));
  if (!fs::exists(dir / "abl" / "ablation.json")) return {false, fmt::format("ablate exited {}", rc)};
  const auto summary = nlohmann::json::parse(slurp(dir / "abl" / "ablation.json"));
  std::set<std::string> snapshots;
  for (const auto& row : summary.at("rows")) snapshots.insert(row.at("config_snapshot").dump());
  const auto rows = summary.at("rows").size();
  return {rc == 0 && rows == kAblationRows && snapshots.size() == rows,
          fmt::format("exit {}, {} rows, {} distinct snapshots", rc, rows, snapshots.size())};
}

Outcome verdict_validation(const fs::path& fixtures) {
  const auto cases = naicl::testing::load_judge_fixtures(fixtures / "judge_fixtures.jsonl");
  std::size_t valid = 0, accepted = 0, malformed = 0, rejected = 0, consistent = 0;
  for (const auto& c : cases) {
    if (c.valid) {
      ++valid;
      try {
        const auto v = parse_verdict(c.raw, c.caption);
        if (v.hallucinated == c.hallucinated && naicl::testing::sorted_labels(v) == c.types) ++accepted;
        if (v.hallucinated == !v.types.empty()) ++consistent;
      } catch (const Error&) {
      }
    } else {
      ++malformed;
      try {
        parse_verdict(c.raw, c.caption);
      } catch (const Error& e) {
        if (e.code() == c.code) ++rejected;
      }
    }
  }
  return {valid > 0 && accepted == valid && consistent == valid && malformed == 5 && rejected == malformed,
          fmt::format("valid accepted {}/{}, malformed rejected {}/{}, flag consistent {}/{}", accepted, valid,
                      rejected, malformed, consistent, valid)};
}

Outcome prompt_hygiene(const fs::path& dir) {
  const auto lib_root = dir / "lib2s";
  const auto library = load_library(lib_root);
  const auto index = PriorIndex::load(lib_root);
  const auto& event_terms = KeywordSets::defaults().event;
  BenchmarkRecord sample;
  sample.id = "probe";
  sample.audio_path = dir / "audio/s00.wav";
  AssembleOptions options;
  options.event_terms = nullptr;  // the check below is the oracle

  std::size_t requests = 0, captions = 0, hits = 0;
  auto inspect = [&](const AssembledRequest& request) {
    ++requests;
    for (std::size_t m = 0; m + 1 < request.messages.size(); ++m) {
      for (const auto& part : request.messages[m].content) {
        if (part.kind != ContentPart::Kind::kText) continue;
        ++captions;
        if (oracle::naive_frequency({part.text}, event_terms) > 0) ++hits;
      }
    }
  };
  for (bool structured : {true, false}) {
    VariantConfig retrieval;
    retrieval.name = "r";
    retrieval.structured = structured;
    const auto rplan = plan_variant(retrieval, &library);
    for (const auto& entry : library.entries) {
      const auto ctx = index.retrieve(*entry.embedding, kDefaultTopK, sample.id);
      inspect(assemble(sample, sample.audio_path, rplan, &ctx, options));
    }
    for (std::size_t i = 0; i + kDefaultTopK <= library.entries.size(); i += kDefaultTopK) {
      VariantConfig fixed;
      fixed.name = "f";
      fixed.variant = Variant::kNaiclFixed;
      fixed.structured = structured;
      for (std::size_t j = 0; j < kDefaultTopK; ++j) fixed.fixed_ids.push_back(library.entries[i + j].id);
      inspect(assemble(sample, sample.audio_path, plan_variant(fixed, &library), nullptr, options));
    }
  }
  return {hits == 0 && captions > 0,
          fmt::format("{} requests, {} noise captions, {} with event terms", requests, captions, hits)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NAICL acceptance checks"};
  fs::path cli, fixtures;
  app.add_option("--cli", cli, "naicl executable")->required()->check(CLI::ExistingFile);
  app.add_option("--fixtures", fixtures, "tests/fixtures directory")->required()->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  naicl::testing::TempDir work("naicl-acceptance");
  std::string why;
  const bool e2e_ready = prepare_e2e(cli, fixtures, work.path(), why);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"noise_spectra", noise_spectra},
      {"retrieval_exactness", retrieval_exactness},
      {"metric_oracle", metric_oracle},
      {"keyword_frequency_fixture", keyword_fixture},
      {"end_to_end_mock", [&] { return e2e_ready ? end_to_end(cli, work.path()) : Outcome{false, why}; }},
      {"ablation_matrix", [&] { return e2e_ready ? ablation(cli, work.path()) : Outcome{false, why}; }},
      {"verdict_validation", [&] { return verdict_validation(fixtures); }},
      {"prompt_hygiene", [&] { return e2e_ready ? prompt_hygiene(work.path()) : Outcome{false, why}; }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    fmt::print("{} {} ({})\n", out.pass ? "PASS" : "FAIL", name, out.detail);
  }
  fmt::print("{} / {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
