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
#include "reporec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "reporec/errors.hpp"
#include "reporec/strings.hpp"

namespace reporec {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Calls fn(lineno, parsed_json) for every non-empty line.
template <class Fn>
void for_each_jsonl(const std::filesystem::path& path, const Fn& fn) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), lineno, e.what());
    }
    fn(lineno, j);
  }
}

std::string require_string(const json& j, const char* key, const std::filesystem::path& path,
                           std::size_t lineno) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(path.string(), lineno, std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

std::int64_t count_field(const json& j, const char* key, const std::filesystem::path& path,
                         std::size_t lineno) {
  if (!j.contains(key) || j.at(key).is_null()) return 0;
  if (!j.at(key).is_number_integer()) {
    throw ParseError(path.string(), lineno, std::string("field '") + key + "' must be an integer");
  }
  std::int64_t v = j.at(key).get<std::int64_t>();
  if (v < 0) {
    throw ParseError(path.string(), lineno, std::string("field '") + key + "' must be >= 0");
  }
  return v;
}

}  // namespace

CorpusPaths CorpusPaths::in_dir(const std::filesystem::path& dir) {
  return {dir / "repos.jsonl", dir / "users.jsonl", dir / "interactions.jsonl"};
}

int Corpus::repo_index(std::string_view id) const {
  auto it = repo_by_id_.find(std::string(id));
  return it == repo_by_id_.end() ? -1 : it->second;
}

int Corpus::user_index(std::string_view id) const {
  auto it = user_by_id_.find(std::string(id));
  return it == user_by_id_.end() ? -1 : it->second;
}

std::size_t Corpus::interaction_count() const {
  std::size_t n = 0;
  for (const auto& u : users) n += u.interactions.size();
  return n;
}

double Corpus::sparsity() const {
  if (users.empty() || repos.empty()) return 1.0;
  std::size_t filled = 0;
  std::vector<int> seen;
  for (const auto& u : users) {
    seen.clear();
    for (const auto& it : u.interactions) seen.push_back(it.repo);
    std::sort(seen.begin(), seen.end());
    filled += static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
  }
  return 1.0 - static_cast<double>(filled) / (static_cast<double>(users.size()) *
                                              static_cast<double>(repos.size()));
}

void Corpus::finalize() {
  std::vector<int> new_index(repos.size());
  {
    std::vector<int> order(repos.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return repos[a].id < repos[b].id; });
    std::vector<Repository> sorted;
    sorted.reserve(repos.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      new_index[order[pos]] = static_cast<int>(pos);
      sorted.push_back(std::move(repos[order[pos]]));
    }
    repos = std::move(sorted);
  }
  std::sort(users.begin(), users.end(), [](const User& a, const User& b) { return a.id < b.id; });

  repo_by_id_.clear();
  user_by_id_.clear();
  for (std::size_t i = 0; i < repos.size(); ++i) repo_by_id_[repos[i].id] = static_cast<int>(i);
  for (std::size_t i = 0; i < users.size(); ++i) user_by_id_[users[i].id] = static_cast<int>(i);

  for (auto& u : users) {
    for (auto& it : u.interactions) it.repo = new_index[it.repo];
    // Ties on timestamp break by repository id; index order equals id order.
    std::sort(u.interactions.begin(), u.interactions.end(),
              [](const Interaction& a, const Interaction& b) {
                return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.repo < b.repo;
              });
  }
}

Corpus load_corpus(const CorpusPaths& paths, const TextNormalizer& normalizer) {
  Corpus corpus;
  std::unordered_map<std::string, int> repo_ix;

  for_each_jsonl(paths.repos, [&](std::size_t lineno, const json& j) {
    Repository r;
    r.id = require_string(j, "id", paths.repos, lineno);
    if (repo_ix.count(r.id)) {
      throw ParseError(paths.repos.string(), lineno, "duplicate repository id '" + r.id + "'");
    }
    repo_ix[r.id] = static_cast<int>(corpus.repos.size());
    if (j.contains("topics")) {
      if (!j.at("topics").is_array()) {
        throw ParseError(paths.repos.string(), lineno, "field 'topics' must be an array");
      }
      std::set<std::string> topics;
      for (const auto& t : j.at("topics")) {
        if (!t.is_string()) {
          throw ParseError(paths.repos.string(), lineno, "topics entries must be strings");
        }
        auto norm = normalizer.normalize_topic(t.get<std::string>());
        if (!norm.empty()) topics.insert(norm);
      }
      r.explicit_topics.assign(topics.begin(), topics.end());
    }
    if (j.contains("description") && !j.at("description").is_null()) {
      r.description = j.at("description").get<std::string>();
    }
    if (j.contains("readme") && !j.at("readme").is_null()) {
      r.readme = j.at("readme").get<std::string>();
    }
    if (j.contains("language") && !j.at("language").is_null()) {
      auto lang = TextNormalizer::normalize_language(j.at("language").get<std::string>());
      if (!lang.empty()) r.language = lang;
    }
    r.watches = count_field(j, "watches", paths.repos, lineno);
    r.stars = count_field(j, "stars", paths.repos, lineno);
    r.forks = count_field(j, "forks", paths.repos, lineno);
    corpus.repos.push_back(std::move(r));
  });

  std::unordered_map<std::string, int> user_ix;
  for_each_jsonl(paths.users, [&](std::size_t lineno, const json& j) {
    User u;
    u.id = require_string(j, "id", paths.users, lineno);
    if (user_ix.count(u.id)) {
      throw ParseError(paths.users.string(), lineno, "duplicate user id '" + u.id + "'");
    }
    user_ix[u.id] = static_cast<int>(corpus.users.size());
    corpus.users.push_back(std::move(u));
  });

  std::size_t n_interactions = 0;
  for_each_jsonl(paths.interactions, [&](std::size_t lineno, const json& j) {
    auto user_id = require_string(j, "user_id", paths.interactions, lineno);
    auto repo_id = require_string(j, "repo_id", paths.interactions, lineno);
    if (!j.contains("timestamp") || !j.at("timestamp").is_number_integer()) {
      throw ParseError(paths.interactions.string(), lineno, "missing integer field 'timestamp'");
    }
    auto uit = user_ix.find(user_id);
    if (uit == user_ix.end()) {
      throw ParseError(paths.interactions.string(), lineno,
                       "unknown user '" + user_id + "' referenced");
    }
    auto rit = repo_ix.find(repo_id);
    if (rit == repo_ix.end()) {
      throw ParseError(paths.interactions.string(), lineno,
                       "unknown repository '" + repo_id + "' referenced");
    }
    corpus.users[uit->second].interactions.push_back(
        {rit->second, j.at("timestamp").get<std::int64_t>()});
    ++n_interactions;
  });
  if (n_interactions == 0) {
    throw ValidationError("no interactions in " + paths.interactions.string());
  }

  corpus.finalize();
  return corpus;
}

void save_corpus(const Corpus& corpus, const CorpusPaths& paths) {
  {
    std::ofstream out(paths.repos);
    if (!out) throw ValidationError("cannot write " + paths.repos.string());
    for (const auto& r : corpus.repos) {
      ordered_json j;
      j["id"] = r.id;
      j["topics"] = r.explicit_topics;
      j["description"] = r.description;
      j["readme"] = r.readme;
      if (r.language) j["language"] = *r.language;
      j["watches"] = r.watches;
      j["stars"] = r.stars;
      j["forks"] = r.forks;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(paths.users);
    if (!out) throw ValidationError("cannot write " + paths.users.string());
    for (const auto& u : corpus.users) {
      ordered_json j;
      j["id"] = u.id;
      out << j.dump() << '\n';
    }
  }
  {
    std::ofstream out(paths.interactions);
    if (!out) throw ValidationError("cannot write " + paths.interactions.string());
    for (const auto& u : corpus.users) {
      for (const auto& it : u.interactions) {
        ordered_json j;
        j["user_id"] = u.id;
        j["repo_id"] = corpus.repos[it.repo].id;
        j["timestamp"] = it.timestamp;
        out << j.dump() << '\n';
      }
    }
  }
}

Corpus filter_corpus(const Corpus& corpus, int min_user_repos, int min_repo_users,
                     bool single_pass) {
  if (min_user_repos < 1 || min_repo_users < 1) {
    throw ValidationError("filter thresholds must be >= 1");
  }

  std::vector<char> user_alive(corpus.users.size(), 1);
  std::vector<char> repo_alive(corpus.repos.size(), 1);

  auto user_pass = [&]() {
    bool changed = false;
    for (std::size_t ui = 0; ui < corpus.users.size(); ++ui) {
      if (!user_alive[ui]) continue;
      std::size_t count = 0;
      for (const auto& it : corpus.users[ui].interactions) {
        if (repo_alive[it.repo]) ++count;
      }
      if (count < static_cast<std::size_t>(min_user_repos)) {
        user_alive[ui] = 0;
        changed = true;
      }
    }
    return changed;
  };
  auto repo_pass = [&]() {
    bool changed = false;
    std::vector<std::set<int>> repo_users(corpus.repos.size());
    for (std::size_t ui = 0; ui < corpus.users.size(); ++ui) {
      if (!user_alive[ui]) continue;
      for (const auto& it : corpus.users[ui].interactions) {
        if (repo_alive[it.repo]) repo_users[it.repo].insert(static_cast<int>(ui));
      }
    }
    for (std::size_t ri = 0; ri < corpus.repos.size(); ++ri) {
      if (!repo_alive[ri]) continue;
      if (repo_users[ri].size() < static_cast<std::size_t>(min_repo_users)) {
        repo_alive[ri] = 0;
        changed = true;
      }
    }
    return changed;
  };

  if (single_pass) {
    user_pass();
    repo_pass();
  } else {
    bool changed = true;
    while (changed) {
      changed = user_pass();
      changed = repo_pass() || changed;
    }
  }

  Corpus out;
  std::vector<int> repo_map(corpus.repos.size(), -1);
  for (std::size_t ri = 0; ri < corpus.repos.size(); ++ri) {
    if (!repo_alive[ri]) continue;
    repo_map[ri] = static_cast<int>(out.repos.size());
    out.repos.push_back(corpus.repos[ri]);
  }
  for (std::size_t ui = 0; ui < corpus.users.size(); ++ui) {
    if (!user_alive[ui]) continue;
    User u;
    u.id = corpus.users[ui].id;
    for (const auto& it : corpus.users[ui].interactions) {
      if (repo_map[it.repo] >= 0) u.interactions.push_back({repo_map[it.repo], it.timestamp});
    }
    if (!u.interactions.empty()) out.users.push_back(std::move(u));
  }
  if (out.users.empty() || out.repos.empty()) {
    throw ValidationError("filter too aggressive: corpus is empty");
  }
  out.finalize();
  return out;
}

TopicVocabulary TopicVocabulary::build(const Corpus& corpus) {
  std::set<std::string> all;
  for (const auto& r : corpus.repos) {
    all.insert(r.explicit_topics.begin(), r.explicit_topics.end());
    if (r.language) all.insert(*r.language);
  }
  TopicVocabulary vocab;
  vocab.topics.assign(all.begin(), all.end());
  for (std::size_t i = 0; i < vocab.topics.size(); ++i) {
    vocab.index[vocab.topics[i]] = static_cast<int>(i);
  }
  return vocab;
}

int TopicVocabulary::find(std::string_view topic) const {
  auto it = index.find(std::string(topic));
  return it == index.end() ? -1 : it->second;
}

namespace {

// Positions of each token, for O(1) candidate lookup during phrase matching.
struct TokenIndex {
  std::vector<std::string> tokens;
  std::unordered_map<std::string_view, std::vector<int>> positions;

  explicit TokenIndex(std::vector<std::string> toks) : tokens(std::move(toks)) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      positions[tokens[i]].push_back(static_cast<int>(i));
    }
  }

  bool contains_phrase(const std::vector<std::string_view>& phrase) const {
    if (phrase.empty()) return false;
    auto it = positions.find(phrase[0]);
    if (it == positions.end()) return false;
    for (int start : it->second) {
      if (start + phrase.size() > tokens.size()) break;
      bool ok = true;
      for (std::size_t k = 1; k < phrase.size(); ++k) {
        if (tokens[start + k] != phrase[k]) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  }
};

}  // namespace

std::vector<std::string> complete_topics(const Repository& repo, const TopicVocabulary& vocab,
                                         const TextNormalizer& normalizer) {
  std::set<std::string> result(repo.explicit_topics.begin(), repo.explicit_topics.end());

  TokenIndex description(normalizer.normalize(repo.description));
  TokenIndex readme(normalizer.normalize(repo.readme));

  for (const auto& topic : vocab.topics) {
    if (result.count(topic)) continue;
    std::vector<std::string_view> phrase;
    for (auto part : split(topic, '-')) {
      if (!part.empty()) phrase.push_back(part);
    }
    if (phrase.empty()) continue;
    if (description.contains_phrase(phrase) || readme.contains_phrase(phrase)) {
      result.insert(topic);
    }
  }
  if (repo.language) result.insert(*repo.language);
  return {result.begin(), result.end()};
}

std::vector<TrainingRecord> build_training_records(const Corpus& corpus, int window_len,
                                                   WindowMode mode) {
  if (window_len < 1) throw ValidationError("window length must be >= 1");
  std::vector<TrainingRecord> records;
  for (std::size_t ui = 0; ui < corpus.users.size(); ++ui) {
    const auto& seq = corpus.users[ui].interactions;
    const int m = static_cast<int>(seq.size());
    for (int t = 2; t <= m; ++t) {  // 1-based label position
      int first;
      if (mode == WindowMode::kFixed) {
        if (t - window_len < 1) continue;
        first = t - window_len;
      } else {
        first = 1;
      }
      TrainingRecord rec;
      rec.user = static_cast<int>(ui);
      rec.step = t;
      rec.label = seq[t - 1].repo;
      rec.window.reserve(t - first);
      for (int i = first; i <= t - 1; ++i) rec.window.push_back(seq[i - 1].repo);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace reporec
