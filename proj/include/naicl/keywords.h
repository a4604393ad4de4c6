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
#include <string_view>
#include <vector>

namespace naicl {

enum class KeywordCategory { kEvent, kDefinite, kAcoustic };

inline constexpr std::size_t kDefaultKeywordSetSize = 30;

std::string_view to_string(KeywordCategory category);

// Lower-cased alphanumeric tokens. With `stem`, a light suffix stripper
// (-ing, -ed, -es, -s) is applied to every token.
std::vector<std::string> tokenize(std::string_view text, bool stem = false);

// Word-boundary matcher over a term list. Multi-word (or hyphenated) terms
// match as contiguous token sequences; matching is case-insensitive.
class KeywordMatcher {
 public:
  KeywordMatcher() = default;
  explicit KeywordMatcher(const std::vector<std::string>& terms, bool stem = false);

  bool matches(std::string_view text) const;
  bool matches_tokens(const std::vector<std::string>& tokens) const;
  std::vector<std::string> matched_terms(std::string_view text) const;

  bool empty() const { return patterns_.empty(); }
  bool stemming() const { return stem_; }

 private:
  struct Pattern {
    std::string term;
    std::vector<std::string> tokens;
  };
  std::vector<Pattern> patterns_;
  bool stem_ = false;
};

struct KeywordSets {
  std::vector<std::string> event;
  std::vector<std::string> definite;
  std::vector<std::string> acoustic;

  const std::vector<std::string>& get(KeywordCategory category) const;

  // Terms lower-case and non-empty, sets pairwise disjoint. When
  // `expected_size` is non-zero every set must have exactly that many
  // distinct terms.
  void validate(std::size_t expected_size = 0) const;

  static const KeywordSets& defaults();
  static KeywordSets load(const std::filesystem::path& event_file,
                          const std::filesystem::path& definite_file,
                          const std::filesystem::path& acoustic_file);
};

// One term per line, UTF-8, '#' starts a comment, blank lines ignored.
std::vector<std::string> load_keyword_file(const std::filesystem::path& path);

// Matcher over the default Event-Verbs set, used for description hygiene.
const KeywordMatcher& default_event_matcher();

}  // namespace naicl
