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

#include "naicl/bench_dataset.h"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "naicl/error.h"

namespace naicl {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::kSchema, what); }

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key)) schema(fmt::format("missing field '{}'", key));
  if (!j[key].is_string()) schema(fmt::format("field '{}' must be a string", key));
  auto s = j[key].get<std::string>();
  if (s.find_first_not_of(" \t\r\n") == std::string::npos) schema(fmt::format("field '{}' is empty", key));
  return s;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) schema(fmt::format("field '{}' must be an array", key));
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) schema(fmt::format("field '{}' must hold strings", key));
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

const BenchmarkRecord* Benchmark::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

json record_to_json(const BenchmarkRecord& r) {
  return json{{"id", r.id},
              {"audio_path", r.audio_path.generic_string()},
              {"original_captions", r.original_captions},
              {"reference", r.reference},
              {"events", r.events},
              {"duration_s", r.duration_s}};
}

BenchmarkRecord record_from_json(const json& j) {
  if (!j.is_object()) schema("record must be a JSON object");
  BenchmarkRecord r;
  r.id = required_string(j, "id");
  r.audio_path = required_string(j, "audio_path");
  r.original_captions = string_list(j, "original_captions");
  if (r.original_captions.size() != kOriginalCaptionCount) {
    schema(fmt::format("expected {} original captions, found {}", kOriginalCaptionCount,
                       r.original_captions.size()));
  }
  for (const auto& c : r.original_captions) {
    if (c.find_first_not_of(" \t\r\n") == std::string::npos) schema("original caption is empty");
  }
  r.reference = required_string(j, "reference");
  r.events = string_list(j, "events");
  if (r.events.empty()) schema("events must not be empty");
  if (!j.contains("duration_s") || !j["duration_s"].is_number()) schema("field 'duration_s' must be a number");
  r.duration_s = j["duration_s"].get<double>();
  if (!std::isfinite(r.duration_s) || r.duration_s <= 0.0) schema("duration_s must be positive");
  return r;
}

Benchmark load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read benchmark manifest: " + path.string());
  Benchmark bench;
  bench.audio_root = options.audio_root.value_or(path.parent_path());
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    BenchmarkRecord r;
    try {
      r = record_from_json(json::parse(line));
    } catch (const json::exception& e) {
      problems.push_back(fmt::format("line {}: invalid JSON ({})", line_no, e.what()));
      continue;
    } catch (const Error& e) {
      problems.push_back(fmt::format("line {}: {}", line_no, e.what()));
      continue;
    }
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  fmt::format("{}:{}: duplicate record id '{}'", path.string(), line_no, r.id));
    }
    if (options.verify_audio && !std::filesystem::exists(bench.resolve(r))) {
      problems.push_back(fmt::format("line {}: audio file not found: {}", line_no, bench.resolve(r).string()));
      continue;
    }
    bench.records.push_back(std::move(r));
  }
  if (!problems.empty()) {
    std::string msg = path.string() + ": manifest has invalid records";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::kSchema, msg);
  }
  return bench;
}

void write_manifest(const std::filesystem::path& path, std::span<const BenchmarkRecord> records) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write manifest: " + path.string());
  for (const auto& r : records) os << record_to_json(r).dump() << '\n';
}

json DatasetStats::to_json() const {
  json durations = json::array();
  for (const auto& [start, count] : duration_bins) {
    durations.push_back({{"bin_start_s", start}, {"bin_end_s", start + kDurationBinWidthS}, {"count", count}});
  }
  json events = json::array();
  for (const auto& [n, count] : event_counts) events.push_back({{"events", n}, {"count", count}});
  json labels = json::object();
  for (const auto& [label, count] : label_frequencies) labels[label] = count;
  return json{{"total", total},
              {"duration_histogram", durations},
              {"event_count_histogram", events},
              {"label_frequencies", labels}};
}

DatasetStats dataset_stats(std::span<const BenchmarkRecord> records) {
  DatasetStats s;
  s.total = records.size();
  for (const auto& r : records) {
    const int bin = static_cast<int>(std::floor(r.duration_s / kDurationBinWidthS)) * kDurationBinWidthS;
    ++s.duration_bins[bin];
    ++s.event_counts[r.events.size()];
    for (const auto& label : r.events) ++s.label_frequencies[label];
  }
  return s;
}

}  // namespace naicl
