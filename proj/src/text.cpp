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
#include "reporec/text.hpp"

#include <fstream>
#include <sstream>

#include "reporec/errors.hpp"
#include "reporec/strings.hpp"
#include "reporec/text_tables.hpp"

namespace reporec {

namespace {

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

std::unordered_set<std::string> parse_stopwords(std::string_view table) {
  std::unordered_set<std::string> out;
  for (auto line : split(table, '\n')) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.insert(to_lower(t));
  }
  return out;
}

std::vector<StemRule> parse_rules(std::string_view table) {
  std::vector<StemRule> out;
  std::size_t lineno = 0;
  for (auto line : split(table, '\n')) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (fields.size() != 3) {
      throw ParseError("stemmer rules", lineno, "expected 3 columns (suffix replacement min_stem)");
    }
    StemRule rule;
    rule.suffix = to_lower(fields[0]);
    rule.replacement = fields[1] == "-" ? std::string{} : to_lower(fields[1]);
    rule.min_stem = static_cast<std::size_t>(parse_uint(fields[2], "min_stem"));
    out.push_back(std::move(rule));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TextNormalizer::TextNormalizer()
    : stopwords_(parse_stopwords(detail::kStopwordsTable)),
      rules_(parse_rules(detail::kStemmerRulesTable)) {}

TextNormalizer TextNormalizer::from_tables(std::string_view stopwords, std::string_view rules) {
  TextNormalizer n;
  n.stopwords_ = parse_stopwords(stopwords);
  n.rules_ = parse_rules(rules);
  return n;
}

TextNormalizer TextNormalizer::from_files(const std::filesystem::path& stopwords,
                                          const std::filesystem::path& rules) {
  return from_tables(read_file(stopwords), read_file(rules));
}

std::vector<std::string> TextNormalizer::tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_alnum(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string TextNormalizer::stem(std::string_view token) const {
  for (const auto& rule : rules_) {
    if (token.size() < rule.suffix.size()) continue;
    std::size_t stem_len = token.size() - rule.suffix.size();
    if (stem_len < rule.min_stem) continue;
    if (token.substr(stem_len) != rule.suffix) continue;
    std::string out(token.substr(0, stem_len));
    out += rule.replacement;
    return out;
  }
  return std::string(token);
}

bool TextNormalizer::is_stopword(std::string_view token) const {
  return stopwords_.count(std::string(token)) > 0;
}

std::vector<std::string> TextNormalizer::normalize(std::string_view text) const {
  std::vector<std::string> out;
  for (auto& tok : tokenize(text)) {
    if (stopwords_.count(tok)) continue;
    out.push_back(stem(tok));
  }
  return out;
}

std::string TextNormalizer::normalize_topic(std::string_view topic) const {
  std::string out;
  for (auto& tok : tokenize(topic)) {
    if (!out.empty()) out.push_back('-');
    out += stem(tok);
  }
  return out;
}

std::string TextNormalizer::normalize_language(std::string_view language) {
  std::string out;
  for (auto& tok : tokenize(language)) {
    if (!out.empty()) out.push_back('-');
    out += tok;
  }
  return out;
}

}  // namespace reporec
