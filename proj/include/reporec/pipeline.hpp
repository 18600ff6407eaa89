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
#include <ostream>
#include <string>

#include "reporec/config.hpp"
#include "reporec/corpus.hpp"

namespace reporec {

// Fixed artifact locations below the output directory. Stages communicate
// only through these files; each one carries the config hash in its header
// so stale mixtures are rejected instead of silently combined.
struct ArtifactPaths {
  std::filesystem::path graph;
  std::filesystem::path embeddings;
  std::filesystem::path sdne_checkpoint;
  std::filesystem::path sdne_log;
  std::filesystem::path gru_checkpoint;
  std::filesystem::path train_log;
  std::filesystem::path splits;
  std::filesystem::path metrics;
  std::filesystem::path recommendations;
  std::filesystem::path sparsified;  // directory holding the thinned corpus
  std::filesystem::path sparsify_summary;

  static ArtifactPaths in_dir(const std::filesystem::path& out_dir);
};

// Per-stage random streams derived from the root seed, so rerunning one
// stage never disturbs the others.
std::uint64_t stage_seed(const RunConfig& config, std::string_view stage);

// Loads the corpus from config.in_dir and applies interaction filtering.
Corpus load_filtered_corpus(const RunConfig& config);

// Subcommand bodies. Human-readable progress goes to log; machine-readable
// results go to the artifact files. All of them throw ValidationError for
// bad inputs and TrainingError/ParseError for runtime failures.
void cmd_ingest(const RunConfig& config, std::ostream& log);
void cmd_build_graph(const RunConfig& config, std::ostream& log);
void cmd_train_sdne(const RunConfig& config, std::ostream& log);
void cmd_train_rec(const RunConfig& config, std::ostream& log);
void cmd_evaluate(const RunConfig& config, std::ostream& log);
void cmd_recommend(const RunConfig& config, const std::string& user_id, int top_n,
                   std::ostream& log);
void cmd_sparsify(const RunConfig& config, std::ostream& log);

}  // namespace reporec
