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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reporec/text.hpp"

namespace reporec {

struct Repository {
  std::string id;
  std::vector<std::string> explicit_topics;  // normalized, sorted, unique
  std::string description;
  std::string readme;
  std::optional<std::string> language;  // normalized (lowercase)
  std::int64_t watches = 0;
  std::int64_t stars = 0;
  std::int64_t forks = 0;
};

struct Interaction {
  int repo = -1;  // index into Corpus::repos
  std::int64_t timestamp = 0;
};

struct User {
  std::string id;
  std::vector<Interaction> interactions;  // sorted by (timestamp, repo id)
};

// In-memory interaction corpus. Repositories and users are kept sorted by id,
// so indices double as a deterministic canonical ordering. Immutable once
// built; all operations below return fresh corpora.
struct Corpus {
  std::vector<Repository> repos;
  std::vector<User> users;

  int repo_index(std::string_view id) const;
  int user_index(std::string_view id) const;

  std::size_t interaction_count() const;
  // Fraction of empty cells in the |U| x |R| interaction matrix. Repeat
  // visits to the same repository fill a single cell.
  double sparsity() const;

  // Sorts repos/users by id, sorts interactions by (timestamp, repo id),
  // rebuilds the id lookup tables. Interaction repo indices must already
  // refer to the current repos vector.
  void finalize();

 private:
  std::unordered_map<std::string, int> repo_by_id_;
  std::unordered_map<std::string, int> user_by_id_;
};

struct CorpusPaths {
  std::filesystem::path repos;
  std::filesystem::path users;
  std::filesystem::path interactions;

  static CorpusPaths in_dir(const std::filesystem::path& dir);
};

// Reads the three JSON Lines files and resolves all cross-references.
// Throws ParseError (with file:line) on malformed records and
// ValidationError on dangling references, duplicate ids, negative counts,
// or an empty interactions file.
Corpus load_corpus(const CorpusPaths& paths, const TextNormalizer& normalizer);

// Writes a corpus back out in the same three-file JSONL layout.
void save_corpus(const Corpus& corpus, const CorpusPaths& paths);

// Keeps users with at least min_user_repos interactions and repositories
// with at least min_repo_users distinct users. By default iterates to a
// fixed point; single_pass applies one user pass then one repo pass.
// Throws ValidationError if everything is filtered away.
Corpus filter_corpus(const Corpus& corpus, int min_user_repos, int min_repo_users,
                     bool single_pass = false);

// Ordered set of all normalized topic strings (explicit repository topics
// plus language names) with dense positions.
struct TopicVocabulary {
  std::vector<std::string> topics;  // sorted, unique
  std::unordered_map<std::string, int> index;

  static TopicVocabulary build(const Corpus& corpus);

  int find(std::string_view topic) const;
  std::size_t size() const { return topics.size(); }
};

// Explicit topics, vocabulary entries whose token sequence occurs contiguously
// in the normalized description or README, and the language. Sorted unique.
std::vector<std::string> complete_topics(const Repository& repo, const TopicVocabulary& vocab,
                                         const TextNormalizer& normalizer);

struct TrainingRecord {
  int user = -1;
  std::vector<int> window;  // repo indices, chronological
  int label = -1;           // repo index
  int step = 0;             // 1-based position of the label in the user's sequence
};

enum class WindowMode { kFixed, kFullHistory };

// Sliding-window next-repository records over every user sequence.
// Fixed mode emits windows of exactly window_len; users with fewer than
// window_len + 1 interactions produce nothing. Full-history mode emits all
// prior interactions as the window (length >= 1).
std::vector<TrainingRecord> build_training_records(const Corpus& corpus, int window_len,
                                                   WindowMode mode);

}  // namespace reporec
