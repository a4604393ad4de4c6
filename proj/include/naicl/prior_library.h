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
#include <vector>

#include <nlohmann/json.hpp>

#include "naicl/embedding.h"
#include "naicl/noise_forge.h"

namespace naicl {

inline constexpr const char* kManifestFileName = "manifest.jsonl";
inline constexpr const char* kSidecarFileName = "embeddings.bin";

struct NoisePriorEntry {
  std::string id;
  NoiseSpec spec;
  std::filesystem::path audio_path;  // relative to the library root
  ConservativeDescription description;
  std::optional<Embedding> embedding;
};

// The noise prior library: entries in stable order, plus the embedder that
// produced the sidecar (absent until embedded).
struct PriorLibrary {
  std::filesystem::path root;
  std::vector<NoisePriorEntry> entries;
  std::optional<EmbedderConfig> embedder;

  std::filesystem::path resolve(const NoisePriorEntry& entry) const { return root / entry.audio_path; }
  const NoisePriorEntry* find(std::string_view id) const;
  bool fully_embedded() const;
};

nlohmann::json spec_to_json(const NoiseSpec& spec);
NoiseSpec spec_from_json(const nlohmann::json& j);
nlohmann::json entry_to_json(const NoisePriorEntry& entry);
NoisePriorEntry entry_from_json(const nlohmann::json& j);

// Sidecar layout: one JSON header line {"kind","dim","count","embedder"}
// followed by count*dim little-endian float32 values, row-major, in
// manifest order.
struct SidecarHeader {
  std::string kind;
  std::size_t dim = 0;
  std::size_t count = 0;
  EmbedderConfig embedder;
};

void write_manifest(const std::filesystem::path& path, std::span<const NoisePriorEntry> entries);
std::vector<NoisePriorEntry> read_manifest(const std::filesystem::path& path);
void write_sidecar(const std::filesystem::path& path, const PriorLibrary& library);
SidecarHeader read_sidecar(const std::filesystem::path& path,
                           std::vector<std::vector<float>>* rows);

// Loads <root>/manifest.jsonl and, when present, <root>/embeddings.bin.
PriorLibrary load_library(const std::filesystem::path& root);
void save_library(const PriorLibrary& library);

// Synthesizes one WAV per spec under out_dir/audio/ and writes the manifest
// (embeddings empty). Throws kEmpty for no specs, kDuplicateId for colliding
// ids or seeds.
PriorLibrary build_library(std::span<const NoiseSpec> specs, const std::filesystem::path& out_dir);

std::string entry_id_for(std::size_t index, const NoiseSpec& spec);

}  // namespace naicl
