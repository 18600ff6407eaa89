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
#include "reporec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "reporec/artifact.hpp"
#include "reporec/errors.hpp"
#include "reporec/eval.hpp"
#include "reporec/graph.hpp"
#include "reporec/gru.hpp"
#include "reporec/rng.hpp"
#include "reporec/sdne.hpp"
#include "reporec/strings.hpp"
#include "reporec/text.hpp"

namespace reporec {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    default: return "test";
  }
}

// Repositories with at least one training-split interaction, ascending.
std::vector<int> train_repo_subset(const Corpus& train) {
  std::vector<char> mark(train.repos.size(), 0);
  for (const auto& user : train.users) {
    for (const auto& it : user.interactions) mark[static_cast<std::size_t>(it.repo)] = 1;
  }
  std::vector<int> out;
  for (std::size_t r = 0; r < mark.size(); ++r) {
    if (mark[r]) out.push_back(static_cast<int>(r));
  }
  return out;
}

int eval_window_len(const RunConfig& config) {
  return config.full_history() ? std::numeric_limits<int>::max() : config.window;
}

bool eval_skip_short(const RunConfig& config) {
  return config.skip_short_history && !config.full_history();
}

// Everything the sequence stages derive from the corpus before touching the
// model: the chronological split, training-fitted scalers, and the fused
// per-repository feature matrix.
struct SequenceInputs {
  SplitResult split;
  FeatureScalers scalers;
  Eigen::MatrixXd features;
};

SequenceInputs prepare_sequence_inputs(const RunConfig& config, const Corpus& corpus,
                                       const Eigen::MatrixXd& embeddings, std::ostream& log) {
  SequenceInputs inputs;
  inputs.split = chronological_split(corpus, config.split_spec());
  if (!inputs.split.excluded_users.empty()) {
    log << "warning: excluded " << inputs.split.excluded_users.size()
        << " users with fewer than 3 interactions from the split\n";
  }
  auto subset = train_repo_subset(inputs.split.train);
  inputs.scalers = fit_scalers(corpus, subset);
  inputs.features = build_feature_matrix(corpus, embeddings, inputs.scalers);
  return inputs;
}

void write_splits_tsv(const Corpus& corpus, const SplitResult& split,
                      const std::filesystem::path& path, const std::string& config_hash) {
  auto out = open_for_write(path);
  write_artifact_header(out, "splits", config_hash);
  out << "user_id\trepo_id\ttimestamp\tsplit\n";
  for (std::size_t u = 0; u < corpus.users.size(); ++u) {
    const auto& tags = split.tags[u];
    const auto& user = corpus.users[u];
    for (std::size_t p = 0; p < tags.size(); ++p) {
      const auto& it = user.interactions[p];
      out << user.id << '\t' << corpus.repos[static_cast<std::size_t>(it.repo)].id << '\t'
          << it.timestamp << '\t' << split_name(tags[p]) << '\n';
    }
  }
  if (!out) throw ValidationError("failed writing " + path.string());
}

int monitor_n(const RunConfig& config) {
  for (int n : config.top_n) {
    if (n == 10) return 10;
  }
  return config.top_n.front();
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json out;
  for (const auto& [n, cell] : report.by_n) {
    out[std::to_string(n)] = {{"hr", round3(cell.hr)},
                              {"mrr", round3(cell.mrr)},
                              {"ndcg", round3(cell.ndcg)}};
  }
  return out;
}

void print_report(std::ostream& log, const std::string& name, const MetricsReport& report) {
  for (const auto& [n, cell] : report.by_n) {
    log << name << "\tN=" << n << "\thr " << format_fixed(cell.hr, 3) << "\tmrr "
        << format_fixed(cell.mrr, 3) << "\tndcg " << format_fixed(cell.ndcg, 3) << "\n";
  }
}

}  // namespace

ArtifactPaths ArtifactPaths::in_dir(const std::filesystem::path& out_dir) {
  ArtifactPaths p;
  p.graph = out_dir / "graph.tsv";
  p.embeddings = out_dir / "embeddings.tsv";
  p.sdne_checkpoint = out_dir / "sdne_model.ckpt";
  p.sdne_log = out_dir / "sdne_train_log.tsv";
  p.gru_checkpoint = out_dir / "gru_model.ckpt";
  p.train_log = out_dir / "train_log.tsv";
  p.splits = out_dir / "splits.tsv";
  p.metrics = out_dir / "metrics.json";
  p.recommendations = out_dir / "recommendations.tsv";
  p.sparsified = out_dir / "sparsified";
  p.sparsify_summary = out_dir / "sparsify_summary.txt";
  return p;
}

std::uint64_t stage_seed(const RunConfig& config, std::string_view stage) {
  return Rng(config.seed).split(stage).seed();
}

Corpus load_filtered_corpus(const RunConfig& config) {
  TextNormalizer normalizer;
  auto raw = load_corpus(CorpusPaths::in_dir(config.in_dir), normalizer);
  return filter_corpus(raw, config.min_user_repos, config.min_repo_users,
                       config.single_pass_filter);
}

void cmd_ingest(const RunConfig& config, std::ostream& log) {
  config.validate();
  TextNormalizer normalizer;
  auto raw = load_corpus(CorpusPaths::in_dir(config.in_dir), normalizer);
  log << "loaded: " << raw.users.size() << " users, " << raw.repos.size() << " repositories, "
      << raw.interaction_count() << " interactions\n";
  auto corpus = filter_corpus(raw, config.min_user_repos, config.min_repo_users,
                              config.single_pass_filter);
  log << "filtered (>= " << config.min_user_repos << " repos/user, >= " << config.min_repo_users
      << " users/repo): " << corpus.users.size() << " users, " << corpus.repos.size()
      << " repositories, " << corpus.interaction_count() << " interactions\n";
  log << "interaction matrix sparsity: " << format_fixed(corpus.sparsity() * 100.0, 3) << "%\n";
}

void cmd_build_graph(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  TextNormalizer normalizer;
  auto corpus = load_filtered_corpus(config);
  auto vocab = TopicVocabulary::build(corpus);
  auto vectors = build_topic_vectors(corpus, vocab, normalizer);
  log << "topic vocabulary: " << vocab.size() << " topics\n";
  if (vectors.zero_count > 0) {
    log << "warning: " << vectors.zero_count
        << " repositories have no topics and will stay isolated\n";
  }
  auto graph = build_graph(vectors.vectors, config.epsilon);
  auto stats = graph_stats(graph);
  save_graph_tsv(graph, corpus, paths.graph, config.hash());
  log << "graph: " << stats.vertices << " vertices, " << stats.edges << " edges (epsilon "
      << format_shortest(config.epsilon) << "), density " << format_fixed(stats.density * 100.0, 3)
      << "%, " << stats.isolated << " isolated\n";
  log << "wrote " << paths.graph.string() << "\n";
}

void cmd_train_sdne(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  auto corpus = load_filtered_corpus(config);
  auto graph = load_graph_tsv(paths.graph, corpus, config.hash());
  auto sdne_cfg = config.sdne_config(graph.vertex_count, stage_seed(config, "sdne"));

  auto train_log = open_for_write(paths.sdne_log);
  write_artifact_header(train_log, "sdne-train-log", config.hash());
  train_log << "epoch\tloss\n";
  auto result = train_sdne(graph, sdne_cfg, [&](int epoch, double loss) {
    train_log << epoch << '\t' << format_shortest(loss) << '\n';
    log << "epoch " << epoch << "/" << sdne_cfg.epochs << " loss " << format_fixed(loss, 6)
        << "\n";
  });

  save_embeddings_tsv(result.embeddings, corpus, paths.embeddings, config.hash());
  save_checkpoint(to_checkpoint(result.model, config.hash(), sdne_cfg.seed),
                  paths.sdne_checkpoint);
  log << "embedding dimension: " << result.model.embedding_dim() << "\n";
  log << "wrote " << paths.embeddings.string() << ", " << paths.sdne_checkpoint.string() << "\n";
}

void cmd_train_rec(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  auto corpus = load_filtered_corpus(config);
  auto embeddings = load_embeddings_tsv(paths.embeddings, corpus, config.hash());
  auto inputs = prepare_sequence_inputs(config, corpus, embeddings, log);

  auto mode = config.full_history() ? WindowMode::kFullHistory : WindowMode::kFixed;
  auto records = build_training_records(inputs.split.train, config.window, mode);
  if (records.empty()) {
    throw ValidationError("no training records; relax filtering or shorten the window");
  }
  auto valid_queries = build_ranking_queries(corpus, inputs.split, Split::kValid,
                                             eval_window_len(config), eval_skip_short(config));
  const int n = monitor_n(config);
  log << "training records: " << records.size() << ", validation queries: "
      << valid_queries.size() << "\n";

  auto gru_cfg = config.gru_config(stage_seed(config, "gru"));
  auto train_log = open_for_write(paths.train_log);
  write_artifact_header(train_log, "gru-train-log", config.hash());
  train_log << "epoch\tloss\tvalid_hr@" << n << "\n";
  EvalOptions opts;
  opts.n_list = {n};
  opts.exclude_seen = config.exclude_seen;
  auto result = train_gru(inputs.features, records, gru_cfg,
                          [&](int epoch, double loss, const GruModel& model) {
                            double hr = 0.0;
                            if (!valid_queries.empty()) {
                              GruRecommender rec(model, inputs.features);
                              hr = evaluate(rec, valid_queries, opts).by_n.at(n).hr;
                            }
                            train_log << epoch << '\t' << format_shortest(loss) << '\t'
                                      << format_fixed(hr, 3) << '\n';
                            log << "epoch " << epoch << "/" << gru_cfg.max_epochs << " loss "
                                << format_fixed(loss, 6) << " valid hr@" << n << " "
                                << format_fixed(hr, 3) << "\n";
                          });

  save_checkpoint(to_checkpoint(result.model, config.hash(), gru_cfg.seed),
                  paths.gru_checkpoint);
  log << "wrote " << paths.gru_checkpoint.string() << ", " << paths.train_log.string() << "\n";
}

void cmd_evaluate(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  auto corpus = load_filtered_corpus(config);
  auto embeddings = load_embeddings_tsv(paths.embeddings, corpus, config.hash());
  auto model =
      gru_model_from_checkpoint(load_checkpoint(paths.gru_checkpoint, "gru-model", config.hash()));
  auto inputs = prepare_sequence_inputs(config, corpus, embeddings, log);
  if (!inputs.split.test_empty_users.empty()) {
    log << "note: " << inputs.split.test_empty_users.size()
        << " users contribute no test interactions\n";
  }

  auto queries = build_ranking_queries(corpus, inputs.split, Split::kTest, eval_window_len(config),
                                       eval_skip_short(config));
  if (queries.empty()) throw ValidationError("no test queries to evaluate");
  log << "test queries: " << queries.size() << "\n";

  GruRecommender rec(model, inputs.features);
  PopRecommender pop(inputs.split.train);
  ItemKnnRecommender knn(inputs.split.train, corpus);
  EvalOptions opts;
  opts.n_list = config.top_n;
  opts.exclude_seen = config.exclude_seen;
  opts.macro_average = config.macro_average;

  nlohmann::ordered_json doc;
  doc["meta"] = {{"config", config.hash()},
                 {"seed", config.seed},
                 {"level", config.sparsity_level},
                 {"users", corpus.users.size()},
                 {"repositories", corpus.repos.size()},
                 {"interactions", corpus.interaction_count()},
                 {"sparsity_percent", round3(corpus.sparsity() * 100.0)},
                 {"test_records", queries.size()},
                 {"macro_average", config.macro_average},
                 {"exclude_seen", config.exclude_seen}};
  for (const Recommender* r : {static_cast<const Recommender*>(&rec),
                               static_cast<const Recommender*>(&pop),
                               static_cast<const Recommender*>(&knn)}) {
    auto report = evaluate(*r, queries, opts);
    doc[r->name()] = {{config.sparsity_level, report_to_json(report)}};
    print_report(log, r->name(), report);
  }

  auto out = open_for_write(paths.metrics);
  out << doc.dump(2) << "\n";
  if (!out) throw ValidationError("failed writing " + paths.metrics.string());
  write_splits_tsv(corpus, inputs.split, paths.splits, config.hash());
  log << "wrote " << paths.metrics.string() << ", " << paths.splits.string() << "\n";
}

void cmd_recommend(const RunConfig& config, const std::string& user_id, int top_n,
                   std::ostream& log) {
  config.validate();
  if (top_n < 1) throw ValidationError("top-n must be at least 1");
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  auto corpus = load_filtered_corpus(config);
  auto embeddings = load_embeddings_tsv(paths.embeddings, corpus, config.hash());
  auto model =
      gru_model_from_checkpoint(load_checkpoint(paths.gru_checkpoint, "gru-model", config.hash()));
  auto inputs = prepare_sequence_inputs(config, corpus, embeddings, log);

  int user = corpus.user_index(user_id);
  if (user < 0) {
    throw ValidationError("unknown user '" + user_id + "' (filtered out or never seen)");
  }
  const auto& interactions = corpus.users[static_cast<std::size_t>(user)].interactions;
  std::vector<int> window;
  std::size_t take = config.full_history()
                         ? interactions.size()
                         : std::min<std::size_t>(interactions.size(),
                                                 static_cast<std::size_t>(config.window));
  for (std::size_t i = interactions.size() - take; i < interactions.size(); ++i) {
    window.push_back(interactions[i].repo);
  }

  std::vector<std::pair<int, double>> top;
  if (config.exclude_seen) {
    Eigen::VectorXd u = user_representation(model, inputs.features, window);
    std::vector<int> catalog(corpus.repos.size());
    std::iota(catalog.begin(), catalog.end(), 0);
    Eigen::VectorXd scores = candidate_logits(model, u, inputs.features, catalog);
    for (const auto& it : interactions) scores[it.repo] = -std::numeric_limits<double>::infinity();
    top = top_n_by_score(scores, top_n);
  } else {
    top = recommend_top_n(model, inputs.features, window, top_n);
  }

  auto out = open_for_write(paths.recommendations);
  write_artifact_header(out, "recommendations", config.hash());
  out << "user_id\trank\trepo_id\tscore\n";
  for (std::size_t i = 0; i < top.size(); ++i) {
    const auto& repo = corpus.repos[static_cast<std::size_t>(top[i].first)];
    out << user_id << '\t' << i + 1 << '\t' << repo.id << '\t' << format_shortest(top[i].second)
        << '\n';
    log << i + 1 << ". " << repo.id << " (" << format_fixed(top[i].second, 6) << ")\n";
  }
  if (!out) throw ValidationError("failed writing " + paths.recommendations.string());
  log << "wrote " << paths.recommendations.string() << "\n";
}

void cmd_sparsify(const RunConfig& config, std::ostream& log) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  auto paths = ArtifactPaths::in_dir(config.out_dir);
  auto corpus = load_filtered_corpus(config);
  auto before_interactions = corpus.interaction_count();
  double before_sparsity = corpus.sparsity();

  auto spec = config.sparsity_spec(stage_seed(config, "sparsify"));
  auto result = sparsify(corpus, spec);
  if (result.budget_unreachable) {
    log << "warning: only " << result.deletable << " interactions were deletable, below the "
        << "requested budget of " << config.sparsity_budget << "\n";
  }

  std::filesystem::create_directories(paths.sparsified);
  save_corpus(result.corpus, CorpusPaths::in_dir(paths.sparsified));

  auto summary = open_for_write(paths.sparsify_summary);
  write_artifact_header(summary, "sparsify-summary", config.hash());
  summary << "level\t" << config.sparsity_level << "\n";
  summary << "deletable\t" << result.deletable << "\n";
  summary << "deleted\t" << result.deleted << "\n";
  summary << "interactions_before\t" << before_interactions << "\n";
  summary << "interactions_after\t" << result.corpus.interaction_count() << "\n";
  summary << "sparsity_before_percent\t" << format_fixed(before_sparsity * 100.0, 3) << "\n";
  summary << "sparsity_after_percent\t" << format_fixed(result.sparsity * 100.0, 3) << "\n";
  if (!summary) throw ValidationError("failed writing " + paths.sparsify_summary.string());

  log << "level " << config.sparsity_level << ": deleted " << result.deleted << " of "
      << result.deletable << " deletable interactions\n";
  log << "interactions: " << before_interactions << " -> " << result.corpus.interaction_count()
      << ", sparsity " << format_fixed(before_sparsity * 100.0, 3) << "% -> "
      << format_fixed(result.sparsity * 100.0, 3) << "%\n";
  log << "wrote " << paths.sparsified.string() << "/ and " << paths.sparsify_summary.string()
      << "\n";
}

}  // namespace reporec
