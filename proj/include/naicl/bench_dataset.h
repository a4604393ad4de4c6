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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace naicl {

inline constexpr std::size_t kOriginalCaptionCount = 5;
inline constexpr int kDurationBinWidthS = 5;

// One benchmark sample: audio, the five original crowd captions, the
// manually revised reference and AudioSet event labels.
struct BenchmarkRecord {
  std::string id;
  std::filesystem::path audio_path;  // as written in the manifest
  std::vector<std::string> original_captions;
  std::string reference;
  std::vector<std::string> events;
  double duration_s = 0.0;

  bool operator==(const BenchmarkRecord&) const = default;
};

struct Benchmark {
  std::filesystem::path audio_root;
  std::vector<BenchmarkRecord> records;

  std::filesystem::path resolve(const BenchmarkRecord& r) const {
    return r.audio_path.is_absolute() ? r.audio_path : audio_root / r.audio_path;
  }
  const BenchmarkRecord* find(std::string_view id) const;
};

struct ManifestOptions {
  std::optional<std::filesystem::path> audio_root;  // defaults to the manifest's directory
  bool verify_audio = false;
};

nlohmann::json record_to_json(const BenchmarkRecord& record);
// Throws Error(kSchema) describing the first violation.
BenchmarkRecord record_from_json(const nlohmann::json& j);

// Every line is validated; all schema violations are reported together with
// their line numbers (kSchema). A repeated id is fatal (kDuplicateId).
Benchmark load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});
void write_manifest(const std::filesystem::path& path, std::span<const BenchmarkRecord> records);

struct DatasetStats {
  std::size_t total = 0;
  std::map<int, std::size_t> duration_bins;          // bin start (s) -> count
  std::map<std::size_t, std::size_t> event_counts;   // events per record -> count
  std::map<std::string, std::size_t> label_frequencies;

  nlohmann::json to_json() const;
};

DatasetStats dataset_stats(std::span<const BenchmarkRecord> records);

}  // namespace naicl
