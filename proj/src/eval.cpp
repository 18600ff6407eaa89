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
#include "reporec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "reporec/errors.hpp"
#include "reporec/parallel.hpp"

namespace reporec {

void SplitSpec::validate() const {
  if (train_fraction <= 0.0 || valid_fraction < 0.0 || test_fraction < 0.0) {
    throw ValidationError("split fractions must be non-negative with a positive train share");
  }
  if (std::abs(train_fraction + valid_fraction + test_fraction - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
}

SplitResult chronological_split(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  SplitResult res;
  res.train.repos = corpus.repos;
  res.valid.repos = corpus.repos;
  res.test.repos = corpus.repos;
  res.tags.resize(corpus.users.size());

  for (std::size_t i = 0; i < corpus.users.size(); ++i) {
    const User& user = corpus.users[i];
    const auto n = user.interactions.size();
    if (n < 3) {
      res.excluded_users.push_back(user.id);
      continue;
    }
    auto train_n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n))));
    auto valid_n = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(spec.valid_fraction * static_cast<double>(n))),
        n - train_n);
    auto test_n = n - train_n - valid_n;

    res.tags[i].assign(n, Split::kTrain);
    std::fill(res.tags[i].begin() + train_n, res.tags[i].begin() + train_n + valid_n,
              Split::kValid);
    std::fill(res.tags[i].begin() + train_n + valid_n, res.tags[i].end(), Split::kTest);

    auto slice = [&](std::size_t from, std::size_t count) {
      User part;
      part.id = user.id;
      part.interactions.assign(user.interactions.begin() + from,
                               user.interactions.begin() + from + count);
      return part;
    };
    res.train.users.push_back(slice(0, train_n));
    if (valid_n > 0) res.valid.users.push_back(slice(train_n, valid_n));
    if (test_n > 0) {
      res.test.users.push_back(slice(train_n + valid_n, test_n));
    } else {
      res.test_empty_users.push_back(user.id);
    }
  }
  if (res.train.users.empty()) {
    throw ValidationError("no user has enough interactions to split");
  }
  res.train.finalize();
  res.valid.finalize();
  res.test.finalize();
  return res;
}

std::vector<RankingQuery> build_ranking_queries(const Corpus& corpus, const SplitResult& split,
                                                Split target, int window_len, bool skip_short) {
  if (window_len < 1) throw ValidationError("window length must be at least 1");
  std::vector<RankingQuery> out;
  for (std::size_t u = 0; u < corpus.users.size(); ++u) {
    const auto& tags = split.tags[u];
    const auto& interactions = corpus.users[u].interactions;
    for (std::size_t p = 1; p < tags.size(); ++p) {
      if (tags[p] != target) continue;
      if (skip_short && p < static_cast<std::size_t>(window_len)) continue;
      RankingQuery q;
      q.user = static_cast<int>(u);
      q.label = interactions[p].repo;
      auto start = p > static_cast<std::size_t>(window_len) ? p - window_len : 0;
      for (std::size_t j = start; j < p; ++j) q.window.push_back(interactions[j].repo);
      for (std::size_t j = 0; j < p; ++j) q.history.push_back(interactions[j].repo);
      out.push_back(std::move(q));
    }
  }
  return out;
}

int rank_of_label(const Eigen::VectorXd& scores, int label) {
  if (label < 0 || label >= scores.size()) throw ValidationError("label outside the catalog");
  const double s = scores[label];
  int rank = 1;
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (scores[c] > s || (scores[c] == s && c < label)) ++rank;
  }
  return rank;
}

std::vector<std::pair<int, double>> top_n_by_score(const Eigen::VectorXd& scores, int n) {
  std::vector<int> idx(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) idx[i] = static_cast<int>(i);
  auto cmp = [&](int a, int b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  auto count = std::min<std::size_t>(n < 0 ? 0 : static_cast<std::size_t>(n), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), cmp);
  std::vector<std::pair<int, double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.emplace_back(idx[i], scores[idx[i]]);
  return out;
}

double hit_rate(std::optional<int> rank, int n) {
  if (n < 1) throw ValidationError("metric cutoff must be at least 1");
  return rank && *rank <= n ? 1.0 : 0.0;
}

double reciprocal_rank(std::optional<int> rank, int n) {
  if (n < 1) throw ValidationError("metric cutoff must be at least 1");
  return rank && *rank <= n ? 1.0 / *rank : 0.0;
}

double ndcg(std::optional<int> rank, int n) {
  if (n < 1) throw ValidationError("metric cutoff must be at least 1");
  return rank && *rank <= n ? 1.0 / std::log2(*rank + 1.0) : 0.0;
}

MetricsReport evaluate(const Recommender& rec, const std::vector<RankingQuery>& queries,
                       const EvalOptions& opts) {
  if (queries.empty()) throw ValidationError("nothing to evaluate: no ranking queries");
  if (opts.n_list.empty()) throw ValidationError("metric cutoff list is empty");
  for (int n : opts.n_list) {
    if (n < 1) throw ValidationError("metric cutoff must be at least 1");
  }

  std::vector<int> ranks(queries.size());
  parallel_chunks(queries.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Eigen::VectorXd scores = rec.score(queries[i]);
      if (opts.exclude_seen) {
        for (int h : queries[i].history) {
          if (h != queries[i].label) scores[h] = -std::numeric_limits<double>::infinity();
        }
      }
      ranks[i] = rank_of_label(scores, queries[i].label);
    }
  });

  MetricsReport report;
  report.record_count = queries.size();
  for (int n : opts.n_list) {
    MetricCell cell;
    if (!opts.macro_average) {
      for (int r : ranks) {
        cell.hr += hit_rate(r, n);
        cell.mrr += reciprocal_rank(r, n);
        cell.ndcg += ndcg(r, n);
      }
      double denom = static_cast<double>(queries.size());
      cell.hr = 100.0 * cell.hr / denom;
      cell.mrr = 100.0 * cell.mrr / denom;
      cell.ndcg = 100.0 * cell.ndcg / denom;
    } else {
      // Users averaged with equal weight; user order follows first appearance.
      std::vector<int> users;
      std::unordered_map<int, std::size_t> slot;
      std::vector<MetricCell> sums;
      std::vector<std::size_t> counts;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        auto [it, inserted] = slot.try_emplace(queries[i].user, sums.size());
        if (inserted) {
          sums.emplace_back();
          counts.push_back(0);
        }
        auto s = it->second;
        sums[s].hr += hit_rate(ranks[i], n);
        sums[s].mrr += reciprocal_rank(ranks[i], n);
        sums[s].ndcg += ndcg(ranks[i], n);
        ++counts[s];
      }
      for (std::size_t s = 0; s < sums.size(); ++s) {
        cell.hr += sums[s].hr / static_cast<double>(counts[s]);
        cell.mrr += sums[s].mrr / static_cast<double>(counts[s]);
        cell.ndcg += sums[s].ndcg / static_cast<double>(counts[s]);
      }
      double denom = static_cast<double>(sums.size());
      cell.hr = 100.0 * cell.hr / denom;
      cell.mrr = 100.0 * cell.mrr / denom;
      cell.ndcg = 100.0 * cell.ndcg / denom;
    }
    report.by_n[n] = cell;
  }
  return report;
}

SparsityLevel parse_sparsity_level(std::string_view s) {
  if (s == "none") return SparsityLevel::kNone;
  if (s == "half") return SparsityLevel::kHalf;
  if (s == "all") return SparsityLevel::kAll;
  throw ValidationError("unknown sparsity level '" + std::string(s) +
                        "' (expected none, half, or all)");
}

std::string to_string(SparsityLevel level) {
  switch (level) {
    case SparsityLevel::kNone: return "none";
    case SparsityLevel::kHalf: return "half";
    case SparsityLevel::kAll: return "all";
  }
  return "none";
}

SparsifyResult sparsify(const Corpus& corpus, const SparsitySpec& spec) {
  if (spec.min_user_repos < 1 || spec.min_repo_users < 1) {
    throw ValidationError("sparsity constraints must be at least 1");
  }
  const auto n_users = corpus.users.size();
  const auto n_repos = corpus.repos.size();

  // Multiplicity tables so repeat interactions with the same repository do
  // not confuse the distinct counts.
  std::vector<std::unordered_map<int, int>> user_repos(n_users);
  std::vector<std::unordered_map<int, int>> repo_users(n_repos);
  std::vector<int> user_distinct(n_users, 0), repo_distinct(n_repos, 0);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (const auto& it : corpus.users[u].interactions) {
      if (++user_repos[u][it.repo] == 1) ++user_distinct[u];
      if (++repo_users[it.repo][static_cast<int>(u)] == 1) ++repo_distinct[it.repo];
    }
  }

  // Candidate pool over (user, position). An interaction that fails the
  // check now can never pass later, because deletions only lower counts, so
  // rejected candidates leave the pool for good.
  std::vector<std::pair<int, int>> pool;
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t p = 0; p < corpus.users[u].interactions.size(); ++p) {
      pool.emplace_back(static_cast<int>(u), static_cast<int>(p));
    }
  }

  Rng rng(spec.seed);
  std::vector<std::pair<int, int>> sequence;
  while (!pool.empty()) {
    if (spec.budget > 0 && sequence.size() == spec.budget) break;
    auto i = static_cast<std::size_t>(rng.below(pool.size()));
    auto [u, p] = pool[i];
    pool[i] = pool.back();
    pool.pop_back();
    int r = corpus.users[u].interactions[p].repo;
    int user_after = user_distinct[u] - (user_repos[u][r] == 1 ? 1 : 0);
    int repo_after = repo_distinct[r] - (repo_users[r][u] == 1 ? 1 : 0);
    if (user_after < spec.min_user_repos || repo_after < spec.min_repo_users) continue;
    if (--user_repos[u][r] == 0) {
      user_repos[u].erase(r);
      --user_distinct[u];
    }
    if (--repo_users[r][u] == 0) {
      repo_users[r].erase(u);
      --repo_distinct[r];
    }
    sequence.emplace_back(u, p);
  }

  SparsifyResult out;
  out.deletable = sequence.size();
  out.budget_unreachable = spec.budget > 0 && sequence.size() < spec.budget;

  std::size_t target = 0;
  switch (spec.level) {
    case SparsityLevel::kNone: target = 0; break;
    case SparsityLevel::kHalf: target = sequence.size() / 2; break;
    case SparsityLevel::kAll: target = sequence.size(); break;
  }

  std::vector<std::vector<char>> drop(n_users);
  for (std::size_t u = 0; u < n_users; ++u) drop[u].assign(corpus.users[u].interactions.size(), 0);
  for (std::size_t i = 0; i < target; ++i) drop[sequence[i].first][sequence[i].second] = 1;

  out.corpus.repos = corpus.repos;
  for (std::size_t u = 0; u < n_users; ++u) {
    User kept;
    kept.id = corpus.users[u].id;
    for (std::size_t p = 0; p < corpus.users[u].interactions.size(); ++p) {
      if (!drop[u][p]) kept.interactions.push_back(corpus.users[u].interactions[p]);
    }
    if (!kept.interactions.empty()) out.corpus.users.push_back(std::move(kept));
  }
  out.corpus.finalize();
  out.deleted = target;
  out.sparsity = out.corpus.sparsity();
  return out;
}

PopRecommender::PopRecommender(const Corpus& train)
    : counts_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(train.repos.size()))) {
  for (const auto& user : train.users) {
    for (const auto& it : user.interactions) counts_[it.repo] += 1.0;
  }
}

Eigen::VectorXd PopRecommender::score(const RankingQuery&) const { return counts_; }

ItemKnnRecommender::ItemKnnRecommender(const Corpus& train, const Corpus& full) {
  const auto n = static_cast<int>(full.repos.size());
  if (train.repos.size() != full.repos.size()) {
    throw ValidationError("training split must share the full corpus catalog");
  }

  std::vector<std::vector<int>> users_of(n);
  for (std::size_t tu = 0; tu < train.users.size(); ++tu) {
    for (const auto& it : train.users[tu].interactions) {
      users_of[it.repo].push_back(static_cast<int>(tu));
    }
  }
  for (auto& v : users_of) v.erase(std::unique(v.begin(), v.end()), v.end());

  sim_ = Eigen::MatrixXd::Zero(n, n);
  parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto& a = users_of[p];
      if (a.empty()) continue;
      for (int q = 0; q < n; ++q) {
        const auto& b = users_of[q];
        if (b.empty()) continue;
        std::size_t common = 0;
        auto ia = a.begin();
        auto ib = b.begin();
        while (ia != a.end() && ib != b.end()) {
          if (*ia < *ib) {
            ++ia;
          } else if (*ib < *ia) {
            ++ib;
          } else {
            ++common;
            ++ia;
            ++ib;
          }
        }
        if (common > 0) {
          sim_(p, q) = static_cast<double>(common) /
                       (std::sqrt(static_cast<double>(a.size())) *
                        std::sqrt(static_cast<double>(b.size())));
        }
      }
    }
  });

  train_history_.resize(full.users.size());
  for (const auto& user : train.users) {
    int fu = full.user_index(user.id);
    if (fu < 0) throw ValidationError("training split user '" + user.id + "' not in corpus");
    for (const auto& it : user.interactions) train_history_[fu].push_back(it.repo);
  }
}

Eigen::VectorXd ItemKnnRecommender::score(const RankingQuery& query) const {
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(sim_.rows());
  if (query.user < 0 || query.user >= static_cast<int>(train_history_.size())) return scores;
  for (int h : train_history_[query.user]) scores += sim_.col(h);
  return scores;
}

}  // namespace reporec
