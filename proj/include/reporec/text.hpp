// Copyright 2026 The reporec Authors
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
#include <unordered_set>
#include <vector>

namespace reporec {

// One suffix-stripping rule: replace `suffix` by `replacement` when at least
// `min_stem` characters remain in front of it.
struct StemRule {
  std::string suffix;
  std::string replacement;
  std::size_t min_stem = 0;
};

// Deterministic text normalization: lowercase tokenization on alphanumeric
// runs, stop-word removal, and single-pass suffix stripping driven by an
// ordered rule table. The default tables are compiled in from the files
// under data/.
class TextNormalizer {
 public:
  TextNormalizer();  // embedded default tables
  static TextNormalizer from_tables(std::string_view stopwords, std::string_view rules);
  static TextNormalizer from_files(const std::filesystem::path& stopwords,
                                   const std::filesystem::path& rules);

  // Lowercase [a-z0-9]+ runs; every other byte is a separator.
  static std::vector<std::string> tokenize(std::string_view text);

  // First matching rule in table order is applied once; otherwise unchanged.
  std::string stem(std::string_view token) const;

  bool is_stopword(std::string_view token) const;

  // tokenize -> drop stop words -> stem. Pure and deterministic.
  std::vector<std::string> normalize(std::string_view text) const;

  // Canonical form of a topic tag: tokenized, stemmed (no stop-word removal,
  // tags are keywords), joined with '-'. Empty string if nothing remains.
  std::string normalize_topic(std::string_view topic) const;

  // Canonical form of a language name: lowercased, non-alphanumeric runs
  // collapsed to '-'. No stemming.
  static std::string normalize_language(std::string_view language);

  const std::vector<StemRule>& rules() const { return rules_; }

 private:
  std::unordered_set<std::string> stopwords_;
  std::vector<StemRule> rules_;
};

}  // namespace reporec
