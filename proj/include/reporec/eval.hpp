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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reporec/corpus.hpp"
#include "reporec/rng.hpp"

namespace reporec {

enum class Split { kTrain, kValid, kTest };

struct SplitSpec {
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;

  void validate() const;  // fractions non-negative, sum to 1, train > 0
};

// Per-user chronological split. A user with n interactions contributes the
// first floor(train_fraction * n) to train (at least 1), the next
// ceil(valid_fraction * n) to valid, and the remainder to test.
struct SplitResult {
  Corpus train, valid, test;
  // Tag per interaction position, aligned with the input corpus's users.
  // Users excluded for having fewer than 3 interactions get an empty row.
  std::vector<std::vector<Split>> tags;
  std::vector<std::string> excluded_users;
  std::vector<std::string> test_empty_users;
};

SplitResult chronological_split(const Corpus& corpus, const SplitSpec& spec);

// One ranking task: given everything the user did before the label, score
// the catalog and find the label's position.
struct RankingQuery {
  int user = -1;              // index into the corpus the split was built from
  std::vector<int> window;    // most recent interactions, oldest first
  std::vector<int> history;   // all interactions strictly before the label
  int label = -1;
};

// Queries whose label falls in the target split. The window holds the
// window_len interactions immediately before the label regardless of which
// split they fall in; shorter histories are used as-is unless skip_short.
std::vector<RankingQuery> build_ranking_queries(const Corpus& corpus, const SplitResult& split,
                                                Split target, int window_len, bool skip_short);

class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual std::string name() const = 0;
  // One score per catalog repository, higher is better. Must be pure.
  virtual Eigen::VectorXd score(const RankingQuery& query) const = 0;
};

// Position of the label when the catalog is ordered by descending score,
// ties broken by ascending repository index. 1-based.
int rank_of_label(const Eigen::VectorXd& scores, int label);

// Top-n (index, score) pairs under the same ordering.
std::vector<std::pair<int, double>> top_n_by_score(const Eigen::VectorXd& scores, int n);

double hit_rate(std::optional<int> rank, int n);
double reciprocal_rank(std::optional<int> rank, int n);
double ndcg(std::optional<int> rank, int n);

struct MetricCell {
  double hr = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;  // all three as percentages
};

struct MetricsReport {
  std::map<int, MetricCell> by_n;
  std::size_t record_count = 0;
};

struct EvalOptions {
  std::vector<int> n_list = {5, 10, 15, 20};
  // Mask repositories the user already interacted with, keeping the label.
  bool exclude_seen = false;
  // Average per user first instead of over all records.
  bool macro_average = false;
};

MetricsReport evaluate(const Recommender& rec, const std::vector<RankingQuery>& queries,
                       const EvalOptions& opts);

enum class SparsityLevel { kNone, kHalf, kAll };

SparsityLevel parse_sparsity_level(std::string_view s);
std::string to_string(SparsityLevel level);

struct SparsitySpec {
  SparsityLevel level = SparsityLevel::kNone;
  // Cap on the deletion sequence; 0 means every deletable interaction.
  std::size_t budget = 0;
  int min_user_repos = 3;
  int min_repo_users = 1;
  std::uint64_t seed = 0;
};

struct SparsifyResult {
  Corpus corpus;
  std::size_t deletable = 0;  // length of the full deletion sequence
  std::size_t deleted = 0;
  double sparsity = 0.0;  // after deletion
  bool budget_unreachable = false;
};

// Repeatedly deletes a uniformly chosen interaction whose removal keeps
// every user at min_user_repos distinct repositories and every repository
// referenced at least min_repo_users times. The half level applies the
// first floor(budget / 2) deletions of the same sequence.
SparsifyResult sparsify(const Corpus& corpus, const SparsitySpec& spec);

// Static popularity ranking from training interaction counts.
class PopRecommender : public Recommender {
 public:
  explicit PopRecommender(const Corpus& train);

  std::string name() const override { return "pop"; }
  Eigen::VectorXd score(const RankingQuery& query) const override;

 private:
  Eigen::VectorXd counts_;
};

// Item-item cosine over the binary user-repository matrix of the training
// split. A candidate's score is the sum of its similarities to the
// repositories in the user's training history.
class ItemKnnRecommender : public Recommender {
 public:
  // full is the corpus the ranking queries index into; train must be its
  // chronological training slice.
  ItemKnnRecommender(const Corpus& train, const Corpus& full);

  std::string name() const override { return "itemknn"; }
  Eigen::VectorXd score(const RankingQuery& query) const override;

  double similarity(int p, int q) const { return sim_(p, q); }

 private:
  Eigen::MatrixXd sim_;
  std::vector<std::vector<int>> train_history_;  // by full-corpus user index
};

}  // namespace reporec
