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

#include "naicl/keywords.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <span>
#include <string_view>

#include "naicl/error.h"

namespace naicl {
namespace {

// Mirrors data/keywords/*.txt; a unit test keeps the two in sync.
constexpr std::string_view kEventTerms[] = {
    "barks",   "barking",  "chirps",  "chirping", "sings",   "singing",
    "talks",   "talking",  "speaks",  "speaking", "walks",   "walking",
    "runs",    "running",  "drives",  "driving",  "knocks",  "knocking",
    "rings",   "ringing",  "opens",   "opening",  "closes",  "closing",
    "crashes", "splashing", "crying", "laughing", "honking", "clapping",
};

constexpr std::string_view kDefiniteTerms[] = {
    "clearly", "definitely", "certainly", "obviously", "exactly", "a man",
    "a woman", "a child",    "a dog",     "a cat",     "a car",   "a bird",
    "a person", "a door",    "a crowd",   "people",    "someone", "the man",
    "the woman", "the dog",  "the car",   "footsteps", "voices",  "engine",
    "water",   "rain",       "music",     "then",      "suddenly", "finally",
};

constexpr std::string_view kAcousticTerms[] = {
    "noise",         "sound",          "sounds",        "hiss",      "hum",
    "rumble",        "static",         "broadband",     "background", "continuous",
    "steady",        "irregular",      "intermittent",  "low-frequency",
    "high-frequency", "mid-frequency", "frequency",     "frequencies", "texture",
    "tone",          "ambient",        "faint",         "soft",      "muffled",
    "fluctuating",   "constant",       "spectral",      "energy",    "noisy",
    "signal",
};

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string light_stem(std::string token) {
  if (token.size() > 5 && ends_with(token, "ing")) {
    token.resize(token.size() - 3);
  } else if (token.size() > 4 && ends_with(token, "ed")) {
    token.resize(token.size() - 2);
  } else if (token.size() > 4 && ends_with(token, "es")) {
    token.resize(token.size() - 2);
  } else if (token.size() > 3 && ends_with(token, "s") && !ends_with(token, "ss")) {
    token.resize(token.size() - 1);
  }
  return token;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view to_string(KeywordCategory category) {
  switch (category) {
    case KeywordCategory::kEvent: return "event";
    case KeywordCategory::kDefinite: return "definite";
    case KeywordCategory::kAcoustic: return "acoustic";
  }
  return "unknown";
}

std::vector<std::string> tokenize(std::string_view text, bool stem) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(stem ? light_stem(std::move(current)) : std::move(current));
      current.clear();
    }
  };
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

KeywordMatcher::KeywordMatcher(const std::vector<std::string>& terms, bool stem) : stem_(stem) {
  std::set<std::vector<std::string>> seen;
  for (const auto& term : terms) {
    auto toks = tokenize(term, stem);
    if (toks.empty()) continue;
    if (!seen.insert(toks).second) continue;
    patterns_.push_back({term, std::move(toks)});
  }
}

bool KeywordMatcher::matches_tokens(const std::vector<std::string>& tokens) const {
  for (const auto& p : patterns_) {
    if (p.tokens.size() > tokens.size()) continue;
    const auto it = std::search(tokens.begin(), tokens.end(), p.tokens.begin(), p.tokens.end());
    if (it != tokens.end()) return true;
  }
  return false;
}

bool KeywordMatcher::matches(std::string_view text) const {
  return matches_tokens(tokenize(text, stem_));
}

std::vector<std::string> KeywordMatcher::matched_terms(std::string_view text) const {
  const auto tokens = tokenize(text, stem_);
  std::vector<std::string> out;
  for (const auto& p : patterns_) {
    if (std::search(tokens.begin(), tokens.end(), p.tokens.begin(), p.tokens.end()) !=
        tokens.end()) {
      out.push_back(p.term);
    }
  }
  return out;
}

const std::vector<std::string>& KeywordSets::get(KeywordCategory category) const {
  switch (category) {
    case KeywordCategory::kEvent: return event;
    case KeywordCategory::kDefinite: return definite;
    case KeywordCategory::kAcoustic: return acoustic;
  }
  return event;
}

void KeywordSets::validate(std::size_t expected_size) const {
  std::set<std::string> all;
  for (auto category :
       {KeywordCategory::kEvent, KeywordCategory::kDefinite, KeywordCategory::kAcoustic}) {
    std::set<std::string> distinct;
    for (const auto& term : get(category)) {
      if (term.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "keyword set '" + std::string(to_string(category)) + "' has an empty term");
      }
      if (std::any_of(term.begin(), term.end(),
                      [](unsigned char c) { return std::isupper(c); })) {
        throw Error(ErrorCode::kInvalidArgument, "keyword '" + term + "' is not lower-case");
      }
      distinct.insert(term);
    }
    if (expected_size != 0 && distinct.size() != expected_size) {
      throw Error(ErrorCode::kInvalidArgument,
                  "keyword set '" + std::string(to_string(category)) + "' has " +
                      std::to_string(distinct.size()) + " terms, expected " +
                      std::to_string(expected_size));
    }
    for (const auto& term : distinct) {
      if (!all.insert(term).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "keyword '" + term + "' appears in more than one set");
      }
    }
  }
}

const KeywordSets& KeywordSets::defaults() {
  auto list = [](std::span<const std::string_view> terms) {
    return std::vector<std::string>(terms.begin(), terms.end());
  };
  static const KeywordSets sets{list(kEventTerms), list(kDefiniteTerms), list(kAcousticTerms)};
  return sets;
}

KeywordSets KeywordSets::load(const std::filesystem::path& event_file,
                              const std::filesystem::path& definite_file,
                              const std::filesystem::path& acoustic_file) {
  KeywordSets sets{load_keyword_file(event_file), load_keyword_file(definite_file),
                   load_keyword_file(acoustic_file)};
  sets.validate();
  return sets;
}

std::vector<std::string> load_keyword_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot read keyword file: " + path.string());
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string term = trim(line);
    if (term.empty()) continue;
    std::transform(term.begin(), term.end(), term.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    terms.push_back(std::move(term));
  }
  return terms;
}

const KeywordMatcher& default_event_matcher() {
  static const KeywordMatcher matcher(KeywordSets::defaults().event);
  return matcher;
}

}  // namespace naicl
