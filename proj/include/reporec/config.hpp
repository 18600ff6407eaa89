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
#include <string>
#include <vector>

#include "reporec/eval.hpp"
#include "reporec/gru.hpp"
#include "reporec/sdne.hpp"

namespace reporec {

// Every tunable of the pipeline in one place. Loaded from a `key = value`
// file, then optionally overridden by command-line flags. The canonical
// serialization (all keys except out_dir, sorted, one per line) is hashed
// into every artifact so downstream stages can detect mismatched inputs.
struct RunConfig {
  // Data layout.
  std::filesystem::path in_dir = "data/corpus";
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;

  // Corpus filtering.
  int min_user_repos = 6;
  int min_repo_users = 5;
  bool single_pass_filter = false;

  // Similarity graph.
  double epsilon = 0.3;

  // Autoencoder embedding.
  int embedding_dim = 140;
  std::vector<int> sdne_hidden = {512};
  double sdne_alpha = 1.0;
  double sdne_beta = 5.0;
  double sdne_learning_rate = 0.01;
  int sdne_epochs = 50;
  int sdne_batch_size = 128;
  double sdne_weight_decay = 0.0;

  // Sequence model.
  int user_dim = 64;
  int window = 4;
  std::string window_mode = "fixed";  // fixed | full
  int negatives = 10;
  double lambda = 1e-4;
  double learning_rate = 0.009;
  int max_epochs = 100;
  int batch_size = 128;

  // Evaluation.
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
  bool skip_short_history = false;
  bool exclude_seen = false;
  bool macro_average = false;
  std::vector<int> top_n = {5, 10, 15, 20};

  // Sparsity simulation.
  std::string sparsity_level = "none";
  std::uint64_t sparsity_budget = 0;

  static RunConfig load(const std::filesystem::path& path);

  // Sets one key from its textual form. Throws ValidationError on an
  // unknown key or an unparsable value.
  void apply_override(const std::string& key, const std::string& value);

  void validate() const;

  // Sorted `key=value` lines, excluding out_dir. Doubles use the shortest
  // round-trip form, so equal configs always serialize identically.
  std::string canonical() const;

  // FNV-1a 64-bit hash of canonical(), as 16 hex digits.
  std::string hash() const;

  bool full_history() const { return window_mode == "full"; }

  // Stage views. Seeds are passed in because each stage derives its own
  // stream from the root seed.
  SdneConfig sdne_config(int vertex_count, std::uint64_t stage_seed) const;
  GruConfig gru_config(std::uint64_t stage_seed) const;
  SplitSpec split_spec() const;
  SparsitySpec sparsity_spec(std::uint64_t stage_seed) const;
};

}  // namespace reporec
