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
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "reporec/config.hpp"
#include "reporec/errors.hpp"
#include "reporec/pipeline.hpp"
#include "reporec/strings.hpp"

namespace {

// Shared flags live on the parent app (with fallthrough) so the same
// override reaches every stage and the config hashes stay consistent.
struct CliState {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int window = 0;
  std::string top_n;
  std::string level;
  std::string user_id;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential repository recommendation pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "reporec 0.1.0");

  CliState cli;
  auto* opt_config = app.add_option("--config", cli.config_path, "Path to a key = value config file");
  auto* opt_seed = app.add_option("--seed", cli.seed, "Root random seed");
  auto* opt_out = app.add_option("--out", cli.out_dir, "Output directory for artifacts");
  auto* opt_epsilon = app.add_option("--epsilon", cli.epsilon, "Similarity threshold in (0, 1)");
  auto* opt_window = app.add_option("--window", cli.window, "Interaction window length");
  auto* opt_top_n =
      app.add_option("--top-n", cli.top_n, "Cutoff list for evaluation, or a single cutoff");
  auto* opt_level = app.add_option("--level", cli.level, "Sparsity level: none, half, or all");

  auto* c_ingest = app.add_subcommand("ingest", "Load and filter the corpus, print statistics");
  auto* c_graph = app.add_subcommand("build-graph", "Build the topic similarity graph");
  auto* c_sdne = app.add_subcommand("train-sdne", "Train the graph autoencoder embeddings");
  auto* c_rec = app.add_subcommand("train-rec", "Train the sequence recommendation model");
  auto* c_eval = app.add_subcommand("evaluate", "Rank test interactions and report metrics");
  auto* c_recommend = app.add_subcommand("recommend", "Print top repositories for one user");
  c_recommend->add_option("user", cli.user_id, "User id to recommend for")->required();
  auto* c_sparsify = app.add_subcommand("sparsify", "Write a randomly thinned corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    reporec::RunConfig config;
    if (opt_config->count() > 0) config = reporec::RunConfig::load(cli.config_path);
    if (opt_seed->count() > 0) config.seed = cli.seed;
    if (opt_out->count() > 0) config.out_dir = cli.out_dir;
    if (opt_epsilon->count() > 0) config.epsilon = cli.epsilon;
    if (opt_window->count() > 0) config.window = cli.window;
    if (opt_level->count() > 0) config.sparsity_level = cli.level;
    if (opt_top_n->count() > 0 && !c_recommend->parsed()) {
      config.apply_override("top_n", cli.top_n);
    }

    if (c_ingest->parsed()) {
      reporec::cmd_ingest(config, std::cout);
    } else if (c_graph->parsed()) {
      reporec::cmd_build_graph(config, std::cout);
    } else if (c_sdne->parsed()) {
      reporec::cmd_train_sdne(config, std::cout);
    } else if (c_rec->parsed()) {
      reporec::cmd_train_rec(config, std::cout);
    } else if (c_eval->parsed()) {
      reporec::cmd_evaluate(config, std::cout);
    } else if (c_recommend->parsed()) {
      int n = 10;
      if (opt_top_n->count() > 0) {
        n = static_cast<int>(reporec::parse_int(cli.top_n, "--top-n"));
      }
      reporec::cmd_recommend(config, cli.user_id, n, std::cout);
    } else if (c_sparsify->parsed()) {
      reporec::cmd_sparsify(config, std::cout);
    }
    return 0;
  } catch (const reporec::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
