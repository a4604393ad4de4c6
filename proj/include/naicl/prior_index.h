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
#include <string>
#include <vector>

#include "naicl/embedding.h"
#include "naicl/prior_library.h"

namespace naicl {

inline constexpr std::size_t kDefaultTopK = 3;

struct RetrievalHit {
  std::string entry_id;
  double similarity = 0.0;
  ConservativeDescription description;
  std::filesystem::path audio_path;  // resolved against the library root
};

// Top-k exemplars, similarity descending, ties by ascending entry id.
struct RetrievalContext {
  std::string query_id;
  std::vector<RetrievalHit> hits;
  std::size_t k = 0;
};

// Immutable exact-search index over an embedded library. Rows are unit
// norm, so the dot product is the cosine similarity. Safe for concurrent
// queries.
class PriorIndex {
 public:
  // Throws kEmpty, kMissingEmbedding (naming the entry), kDimensionMismatch
  // or kKindMismatch.
  static PriorIndex build(const PriorLibrary& library);
  static PriorIndex load(const std::filesystem::path& library_root);

  // Throws kOutOfRange unless 1 <= k <= size(); kDimensionMismatch or
  // kKindMismatch when the query does not come from the index's embedder.
  RetrievalContext retrieve(const Embedding& query, std::size_t k, std::string query_id = {}) const;

  std::vector<double> similarities(const Embedding& query) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& kind() const { return kind_; }
  const EmbedderConfig& embedder() const { return embedder_; }
  const std::vector<NoisePriorEntry>& entries() const { return entries_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  PriorIndex() = default;
  void check_query(const Embedding& query) const;

  std::filesystem::path root_;
  std::vector<NoisePriorEntry> entries_;
  std::vector<float> matrix_;  // size() x dim(), row-major
  std::size_t dim_ = 0;
  std::string kind_;
  EmbedderConfig embedder_;
};

}  // namespace naicl
