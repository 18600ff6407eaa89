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
#include "helpers.hpp"

#include <atomic>
#include <random>

#include "reporec/errors.hpp"
#include "reporec/text.hpp"

namespace reporec::test {

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  auto base = std::filesystem::temp_directory_path();
  std::random_device rd;
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto candidate =
        base / ("reporec-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::error_code ec;
    if (std::filesystem::create_directory(candidate, ec)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("could not create a scratch directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Corpus build_corpus(const std::vector<RepoSpec>& repos, const std::vector<UserSpec>& users) {
  TextNormalizer normalizer;
  Corpus corpus;
  for (const auto& spec : repos) {
    Repository r;
    r.id = spec.id;
    for (const auto& t : spec.topics) {
      auto norm = normalizer.normalize_topic(t);
      if (!norm.empty()) r.explicit_topics.push_back(norm);
    }
    std::sort(r.explicit_topics.begin(), r.explicit_topics.end());
    r.explicit_topics.erase(std::unique(r.explicit_topics.begin(), r.explicit_topics.end()),
                            r.explicit_topics.end());
    r.description = spec.description;
    r.readme = spec.readme;
    if (!spec.language.empty()) r.language = TextNormalizer::normalize_language(spec.language);
    r.watches = spec.watches;
    r.stars = spec.stars;
    r.forks = spec.forks;
    corpus.repos.push_back(std::move(r));
  }
  // Index by current position; finalize() re-sorts and remaps.
  std::unordered_map<std::string, int> repo_ix;
  for (std::size_t i = 0; i < corpus.repos.size(); ++i) {
    repo_ix[corpus.repos[i].id] = static_cast<int>(i);
  }
  for (const auto& spec : users) {
    User u;
    u.id = spec.id;
    for (const auto& [repo_id, ts] : spec.interactions) {
      auto it = repo_ix.find(repo_id);
      if (it == repo_ix.end()) throw std::runtime_error("fixture references " + repo_id);
      u.interactions.push_back({it->second, ts});
    }
    corpus.users.push_back(std::move(u));
  }
  corpus.finalize();
  return corpus;
}

Corpus random_corpus(Rng& rng, int n_users, int n_repos, int min_len, int max_len) {
  const char* langs[] = {"python", "go", "rust", "javascript"};
  std::vector<RepoSpec> repos;
  for (int j = 0; j < n_repos; ++j) {
    RepoSpec r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "repo%03d", j);
    r.id = buf;
    int group = j % 4;
    r.topics = {"group" + std::to_string(group), "tag" + std::to_string(j)};
    if (rng.uniform() < 0.5) r.topics.push_back("shared");
    r.description = "tools for group " + std::to_string(group);
    r.readme = "";
    r.language = langs[group];
    r.watches = static_cast<std::int64_t>(rng.below(500));
    r.stars = static_cast<std::int64_t>(rng.below(2000));
    r.forks = static_cast<std::int64_t>(rng.below(300));
    repos.push_back(std::move(r));
  }
  std::vector<UserSpec> users;
  for (int i = 0; i < n_users; ++i) {
    UserSpec u;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "user%03d", i);
    u.id = buf;
    int len = min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - min_len + 1)));
    int group = i % 4;
    std::int64_t t = 1000 + i;
    for (int k = 0; k < len; ++k) {
      int repo;
      if (rng.uniform() < 0.75) {
        // stay in the user's group
        int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>((n_repos + 3) / 4)));
        repo = std::min(n_repos - 1, group + 4 * offset);
      } else {
        repo = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_repos)));
      }
      u.interactions.emplace_back(repos[static_cast<std::size_t>(repo)].id, t);
      t += 1 + static_cast<std::int64_t>(rng.below(20));
    }
    users.push_back(std::move(u));
  }
  return build_corpus(repos, users);
}

std::vector<int> transition_table(int n_repos) {
  std::vector<int> next(static_cast<std::size_t>(n_repos));
  for (int j = 0; j < n_repos; ++j) next[static_cast<std::size_t>(j)] = (7 * j + 3) % n_repos;
  return next;
}

Corpus transition_corpus(int n_users, int n_repos, int seq_len, int clean_suffix, double noise,
                         std::uint64_t seed) {
  auto table = transition_table(n_repos);
  std::vector<RepoSpec> repos;
  for (int j = 0; j < n_repos; ++j) {
    RepoSpec r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "repo%02d", j);
    r.id = buf;
    r.topics = {"tag" + std::to_string(j), "grp" + std::to_string(j % 4)};
    r.description = "state " + std::to_string(j);
    r.language = (j % 2 == 0) ? "python" : "go";
    r.watches = 10 + 3 * j;
    r.stars = 20 + 7 * j;
    r.forks = 1 + j;
    repos.push_back(std::move(r));
  }
  Rng rng(seed);
  std::vector<UserSpec> users;
  for (int i = 0; i < n_users; ++i) {
    UserSpec u;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%04d", i);
    u.id = buf;
    int state = i % n_repos;
    std::int64_t t = 10000 + i;
    for (int k = 0; k < seq_len; ++k) {
      if (k > 0) {
        bool noisy = k < seq_len - clean_suffix && rng.uniform() < noise;
        state = noisy ? static_cast<int>(rng.below(static_cast<std::uint64_t>(n_repos)))
                      : table[static_cast<std::size_t>(state)];
      }
      u.interactions.emplace_back(repos[static_cast<std::size_t>(state)].id, t + k);
    }
    users.push_back(std::move(u));
  }
  return build_corpus(repos, users);
}

SimilarityGraph clique_graph(int cliques, int per_clique, double weight) {
  SimilarityGraph g;
  g.vertex_count = cliques * per_clique;
  g.epsilon = weight / 2.0;
  g.rows.resize(static_cast<std::size_t>(g.vertex_count));
  for (int c = 0; c < cliques; ++c) {
    for (int a = 0; a < per_clique; ++a) {
      for (int b = 0; b < per_clique; ++b) {
        if (a == b) continue;
        int p = c * per_clique + a;
        int q = c * per_clique + b;
        g.rows[static_cast<std::size_t>(p)].emplace_back(q, weight);
      }
    }
  }
  for (auto& row : g.rows) std::sort(row.begin(), row.end());
  return g;
}

namespace {

void collect(std::vector<double*>& out, Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
}

void collect(std::vector<double*>& out, Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data() + i);
}

}  // namespace

std::vector<double*> param_ptrs(SdneModel& m) {
  std::vector<double*> out;
  for (auto& w : m.enc_w) collect(out, w);
  for (auto& b : m.enc_b) collect(out, b);
  for (auto& w : m.dec_w) collect(out, w);
  for (auto& b : m.dec_b) collect(out, b);
  return out;
}

std::vector<double*> param_ptrs(SdneGradients& g) {
  std::vector<double*> out;
  for (auto& w : g.enc_w) collect(out, w);
  for (auto& b : g.enc_b) collect(out, b);
  for (auto& w : g.dec_w) collect(out, w);
  for (auto& b : g.dec_b) collect(out, b);
  return out;
}

std::vector<double*> param_ptrs(GruModel& m) {
  std::vector<double*> out;
  collect(out, m.w_in);
  collect(out, m.w_z);
  collect(out, m.w_r);
  collect(out, m.w_u);
  return out;
}

std::vector<double*> param_ptrs(GruGradients& g) {
  std::vector<double*> out;
  collect(out, g.w_in);
  collect(out, g.w_z);
  collect(out, g.w_r);
  collect(out, g.w_u);
  return out;
}

Eigen::MatrixXd pattern_matrix(int rows, int cols, int salt) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = ((i * cols + j + salt) % 7 - 3) / 10.0;
    }
  }
  return m;
}

}  // namespace reporec::test
