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

#include "naicl/prior_index.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include <fmt/format.h>

#include "naicl/error.h"

namespace naicl {
namespace {

constexpr double kUnitNormTolerance = 1e-5;

}  // namespace

PriorIndex PriorIndex::build(const PriorLibrary& library) {
  if (library.entries.empty()) throw Error(ErrorCode::kEmpty, "cannot index an empty library");
  PriorIndex index;
  index.root_ = library.root;
  if (library.embedder) index.embedder_ = *library.embedder;
  for (const auto& e : library.entries) {
    if (!e.embedding) {
      throw Error(ErrorCode::kMissingEmbedding, "library entry '" + e.id + "' has no embedding");
    }
    if (index.dim_ == 0) {
      index.dim_ = e.embedding->dim();
      index.kind_ = e.embedding->kind;
    }
    if (e.embedding->dim() != index.dim_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  fmt::format("library entry '{}' has dim {}, index has {}", e.id, e.embedding->dim(),
                              index.dim_));
    }
    if (e.embedding->kind != index.kind_) {
      throw Error(ErrorCode::kKindMismatch, "library entry '" + e.id + "' comes from a different embedder");
    }
    const double norm = std::sqrt(dot(e.embedding->values, e.embedding->values));
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw Error(ErrorCode::kNonFinite, fmt::format("library entry '{}' is not unit-norm ({})", e.id, norm));
    }
  }
  if (index.dim_ == 0) throw Error(ErrorCode::kDimensionMismatch, "embeddings have zero dimension");
  index.entries_ = library.entries;
  index.matrix_.reserve(index.entries_.size() * index.dim_);
  for (const auto& e : index.entries_) {
    index.matrix_.insert(index.matrix_.end(), e.embedding->values.begin(), e.embedding->values.end());
  }
  return index;
}

PriorIndex PriorIndex::load(const std::filesystem::path& library_root) {
  return build(load_library(library_root));
}

void PriorIndex::check_query(const Embedding& query) const {
  if (query.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("query has dim {}, index has {}", query.dim(), dim_));
  }
  if (!query.kind.empty() && query.kind != kind_) {
    throw Error(ErrorCode::kKindMismatch,
                "query embedder '" + query.kind + "' does not match index embedder '" + kind_ + "'");
  }
}

std::vector<double> PriorIndex::similarities(const Embedding& query) const {
  check_query(query);
  std::vector<double> sims(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    sims[i] = dot(std::span<const float>(matrix_.data() + i * dim_, dim_), query.values);
  }
  return sims;
}

RetrievalContext PriorIndex::retrieve(const Embedding& query, std::size_t k, std::string query_id) const {
  if (k < 1 || k > entries_.size()) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("k = {} is out of range [1, {}]", k, entries_.size()));
  }
  const auto sims = similarities(query);
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return entries_[a].id < entries_[b].id;
                    });
  RetrievalContext ctx;
  ctx.query_id = std::move(query_id);
  ctx.k = k;
  ctx.hits.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const auto& e = entries_[order[r]];
    ctx.hits.push_back({e.id, sims[order[r]], e.description, root_ / e.audio_path});
  }
  return ctx;
}

}  // namespace naicl
