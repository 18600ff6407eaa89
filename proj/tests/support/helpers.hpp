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
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "reporec/corpus.hpp"
#include "reporec/graph.hpp"
#include "reporec/gru.hpp"
#include "reporec/rng.hpp"
#include "reporec/sdne.hpp"

namespace reporec::test {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct RepoSpec {
  std::string id;
  std::vector<std::string> topics;  // raw form, normalized by the builder
  std::string description;
  std::string readme;
  std::string language;  // empty means none
  std::int64_t watches = 0;
  std::int64_t stars = 0;
  std::int64_t forks = 0;
};

struct UserSpec {
  std::string id;
  std::vector<std::pair<std::string, std::int64_t>> interactions;  // (repo id, timestamp)
};

// In-memory corpus with the same invariants load_corpus establishes.
Corpus build_corpus(const std::vector<RepoSpec>& repos, const std::vector<UserSpec>& users);

// Random corpus for the property suites: repositories carry group topics,
// users walk mostly within one group. Every user gets at least min_len
// interactions.
Corpus random_corpus(Rng& rng, int n_users, int n_repos, int min_len, int max_len);

// Fixed first-order transition table over n_repos states.
std::vector<int> transition_table(int n_repos);

// Markov corpus: each user starts at (user index mod n_repos) and follows
// the table; with probability noise a step jumps uniformly instead. The
// last clean_suffix steps of every sequence always follow the table.
Corpus transition_corpus(int n_users, int n_repos, int seq_len, int clean_suffix, double noise,
                         std::uint64_t seed);

// Disjoint cliques with uniform edge weight inside each clique.
SimilarityGraph clique_graph(int cliques, int per_clique, double weight);

// Every parameter as a flat pointer list; the model and gradient orders
// match element for element.
std::vector<double*> param_ptrs(SdneModel& m);
std::vector<double*> param_ptrs(SdneGradients& g);
std::vector<double*> param_ptrs(GruModel& m);
std::vector<double*> param_ptrs(GruGradients& g);

// Largest relative mismatch between analytic gradients and central finite
// differences of the supplied loss closure.
template <class Loss>
double max_grad_rel_err(const std::vector<double*>& params, const std::vector<double*>& grads,
                        Loss loss, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + h;
    const double up = loss();
    *params[i] = saved - h;
    const double down = loss();
    *params[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double a = *grads[i];
    const double denom = std::max({std::abs(a), std::abs(fd), 1e-4});
    worst = std::max(worst, std::abs(a - fd) / denom);
  }
  return worst;
}

// Deterministic small weight matrices for frozen-value fixtures; the same
// integer formula as the oracle scripts.
Eigen::MatrixXd pattern_matrix(int rows, int cols, int salt);

// Inclusive uniform integer draw, for terse fixture code.
inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace reporec::test
