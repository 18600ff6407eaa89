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
//
// Release gate for the recommendation pipeline. Each criterion prints one
// verdict line; the exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "reporec/corpus.hpp"
#include "reporec/eval.hpp"
#include "reporec/graph.hpp"
#include "reporec/gru.hpp"
#include "reporec/pipeline.hpp"
#include "reporec/rng.hpp"
#include "reporec/sdne.hpp"
#include "reporec/text.hpp"

using namespace reporec;
using namespace reporec::test;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Random symmetric graph with weights in [0.3, 1), edge probability 0.6.
SimilarityGraph random_graph(Rng& rng, int n) {
  SimilarityGraph g;
  g.vertex_count = n;
  g.epsilon = 0.3;
  g.rows.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      if (rng.uniform() < 0.6) {
        double w = rng.uniform(0.3, 1.0);
        g.rows[static_cast<std::size_t>(p)].emplace_back(q, w);
        g.rows[static_cast<std::size_t>(q)].emplace_back(p, w);
      }
    }
  }
  for (auto& row : g.rows) std::sort(row.begin(), row.end());
  return g;
}

TopicVector random_topic_vector(Rng& rng, int repo, int dim, double density) {
  TopicVector v;
  v.repo = repo;
  v.dim = dim;
  for (int k = 0; k < dim; ++k) {
    if (rng.uniform() < density) v.on_bits.push_back(k);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients of both models against central finite
// differences, 20 random instances each, models under 100 parameters,
// within 10 seconds.

Outcome criterion_gradients() {
  auto start = Clock::now();
  Rng rng(20260823);

  double worst_sdne = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng.below(3));
    int h = 2 + static_cast<int>(rng.below(2));
    auto graph = random_graph(rng, n);
    auto model = SdneModel::init({n, h, 2}, rng);
    if (model.parameter_count() > 100) {
      return {false, fmt("sdne instance has %zu parameters, expected <= 100",
                         model.parameter_count())};
    }
    double alpha = rng.uniform(0.5, 2.0);
    double beta = rng.uniform(2.0, 6.0);
    std::vector<int> batch;
    int batch_n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    for (int i = 0; i < batch_n; ++i) batch.push_back(static_cast<int>(rng.below(n)));

    auto res = backward(graph, model, batch, alpha, beta);
    auto params = param_ptrs(model);
    auto grads = param_ptrs(res.grads);
    double err = max_grad_rel_err(params, grads,
                                  [&] { return batch_loss(graph, model, batch, alpha, beta); });
    worst_sdne = std::max(worst_sdne, err);
  }

  double worst_gru = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int du = 3, dr = 4, catalog = 6;
    auto model = GruModel::init(du, dr, rng);
    if (model.parameter_count() > 100) {
      return {false, fmt("gru instance has %zu parameters, expected <= 100",
                         model.parameter_count())};
    }
    Eigen::MatrixXd features(catalog, dr);
    for (int i = 0; i < catalog; ++i) {
      for (int j = 0; j < dr; ++j) features(i, j) = rng.uniform(-1.0, 1.0);
    }
    double lambda = rng.uniform() * 0.01;
    std::vector<GruTrainRecord> records;
    int n_records = 1 + static_cast<int>(rng.below(3));
    for (int r = 0; r < n_records; ++r) {
      GruTrainRecord rec;
      int len = 1 + static_cast<int>(rng.below(3));
      for (int k = 0; k < len; ++k) rec.window.push_back(static_cast<int>(rng.below(catalog)));
      rec.label = static_cast<int>(rng.below(catalog));
      rec.negatives = sample_negatives(rec.label, catalog, 2, rng);
      records.push_back(std::move(rec));
    }

    auto res = backward(model, features, records, lambda);
    auto params = param_ptrs(model);
    auto grads = param_ptrs(res.grads);
    double err = max_grad_rel_err(
        params, grads, [&] { return training_loss(model, features, records, lambda); });
    worst_gru = std::max(worst_gru, err);
  }

  double elapsed = seconds_since(start);
  bool pass = worst_sdne < 1e-4 && worst_gru < 1e-4 && elapsed < 10.0;
  return {pass, fmt("max rel err autoencoder %.2e, sequence model %.2e over 20+20 instances "
                    "(%.1fs, budget 10s)",
                    worst_sdne, worst_gru, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 2: the similarity graph against an all-pairs brute force on 50
// random corpora, and both training objectives against straight-line
// scalar reimplementations, within 1e-9.

std::vector<double> manual_mlp(const std::vector<Eigen::MatrixXd>& ws,
                               const std::vector<Eigen::VectorXd>& bs, std::vector<double> x) {
  for (std::size_t layer = 0; layer < ws.size(); ++layer) {
    std::vector<double> out(static_cast<std::size_t>(ws[layer].rows()));
    for (Eigen::Index i = 0; i < ws[layer].rows(); ++i) {
      double acc = bs[layer][i];
      for (Eigen::Index j = 0; j < ws[layer].cols(); ++j) {
        acc += ws[layer](i, j) * x[static_cast<std::size_t>(j)];
      }
      out[static_cast<std::size_t>(i)] = sigmoid(acc);
    }
    x = std::move(out);
  }
  return x;
}

double manual_sdne_total(const SimilarityGraph& graph, const SdneModel& model, double alpha,
                         double beta) {
  const int n = graph.vertex_count;
  std::vector<std::vector<double>> embeddings;
  double l2 = 0.0;
  for (int r = 0; r < n; ++r) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (const auto& [q, w] : graph.rows[static_cast<std::size_t>(r)]) {
      x[static_cast<std::size_t>(q)] = w;
    }
    auto y = manual_mlp(model.enc_w, model.enc_b, x);
    auto xhat = manual_mlp(model.dec_w, model.dec_b, y);
    for (int i = 0; i < n; ++i) {
      double pen = x[static_cast<std::size_t>(i)] == 0.0 ? 1.0 : beta;
      double d = (xhat[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) * pen;
      l2 += d * d;
    }
    embeddings.push_back(std::move(y));
  }
  double l1 = 0.0;
  for (int p = 0; p < n; ++p) {
    for (const auto& [q, w] : graph.rows[static_cast<std::size_t>(p)]) {
      double dist = 0.0;
      for (std::size_t d = 0; d < embeddings[static_cast<std::size_t>(p)].size(); ++d) {
        double diff = embeddings[static_cast<std::size_t>(p)][d] -
                      embeddings[static_cast<std::size_t>(q)][d];
        dist += diff * diff;
      }
      l1 += w * dist;
    }
  }
  return l1 + alpha * l2;
}

double manual_gru_loss(const GruModel& model, const Eigen::MatrixXd& features,
                       const std::vector<GruTrainRecord>& records, double lambda) {
  const int du = model.user_dim();
  auto matvec = [](const Eigen::MatrixXd& w, const std::vector<double>& x) {
    std::vector<double> out(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < w.cols(); ++j) acc += w(i, j) * x[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
  };
  auto transform = [&](int repo) {
    std::vector<double> f(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index j = 0; j < features.cols(); ++j) f[static_cast<std::size_t>(j)] = features(repo, j);
    auto t = matvec(model.w_in, f);
    for (auto& v : t) v = sigmoid(v);
    return t;
  };

  double loss = 0.0;
  for (const auto& rec : records) {
    std::vector<double> u(static_cast<std::size_t>(du), 0.0);
    for (int repo : rec.window) {
      auto rh = transform(repo);
      std::vector<double> concat;
      concat.insert(concat.end(), u.begin(), u.end());
      concat.insert(concat.end(), rh.begin(), rh.end());
      auto z = matvec(model.w_z, concat);
      auto g = matvec(model.w_r, concat);
      for (auto& v : z) v = sigmoid(v);
      for (auto& v : g) v = sigmoid(v);
      std::vector<double> gated;
      for (int i = 0; i < du; ++i) {
        gated.push_back(g[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)]);
      }
      gated.insert(gated.end(), rh.begin(), rh.end());
      auto cand = matvec(model.w_u, gated);
      for (auto& v : cand) v = std::tanh(v);
      for (int i = 0; i < du; ++i) {
        auto iz = static_cast<std::size_t>(i);
        u[iz] = z[iz] * u[iz] + (1.0 - z[iz]) * cand[iz];
      }
    }
    std::vector<int> candidates = {rec.label};
    candidates.insert(candidates.end(), rec.negatives.begin(), rec.negatives.end());
    std::vector<double> logits;
    for (int c : candidates) {
      auto t = transform(c);
      double dot = 0.0;
      for (int i = 0; i < du; ++i) dot += t[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
      logits.push_back(dot);
    }
    double peak = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double l : logits) denom += std::exp(l - peak);
    loss += -(logits[0] - peak - std::log(denom));
  }
  double sq = model.w_in.squaredNorm() + model.w_z.squaredNorm() + model.w_r.squaredNorm() +
              model.w_u.squaredNorm();
  return loss + lambda * sq;
}

Outcome criterion_exact_oracles() {
  auto start = Clock::now();
  Rng rng(42424242);

  double worst_graph = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng.below(7));
    int dim = 3 + static_cast<int>(rng.below(8));
    double density = rng.uniform(0.2, 0.8);
    std::vector<TopicVector> vectors;
    for (int r = 0; r < n; ++r) {
      auto v = random_topic_vector(rng, r, dim, density);
      if (rng.uniform() < 0.1) v.on_bits.clear();
      vectors.push_back(std::move(v));
    }
    double eps = rng.uniform(0.05, 0.95);
    auto graph = build_graph(vectors, eps);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        double expect = 0.0;
        if (p != q && !vectors[p].on_bits.empty() && !vectors[q].on_bits.empty()) {
          std::vector<std::int32_t> common;
          std::set_intersection(vectors[p].on_bits.begin(), vectors[p].on_bits.end(),
                                vectors[q].on_bits.begin(), vectors[q].on_bits.end(),
                                std::back_inserter(common));
          double s = static_cast<double>(common.size()) /
                     (std::sqrt(static_cast<double>(vectors[p].on_bits.size())) *
                      std::sqrt(static_cast<double>(vectors[q].on_bits.size())));
          expect = s >= eps ? s : 0.0;
        }
        worst_graph = std::max(worst_graph, std::abs(graph.weight(p, q) - expect));
      }
    }
  }

  double worst_sdne = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng.below(4));
    auto graph = random_graph(rng, n);
    auto model = SdneModel::init({n, 4, 2}, rng);
    double alpha = rng.uniform(0.5, 2.0);
    double beta = rng.uniform(2.0, 6.0);
    double lib = loss_total(graph, model, alpha, beta);
    double manual = manual_sdne_total(graph, model, alpha, beta);
    worst_sdne = std::max(worst_sdne, std::abs(lib - manual));
  }

  double worst_gru = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int catalog = 7, dr = 5, du = 4;
    auto model = GruModel::init(du, dr, rng);
    Eigen::MatrixXd features(catalog, dr);
    for (int i = 0; i < catalog; ++i) {
      for (int j = 0; j < dr; ++j) features(i, j) = rng.uniform(-2.0, 2.0);
    }
    std::vector<GruTrainRecord> records;
    int n_records = 1 + static_cast<int>(rng.below(3));
    for (int r = 0; r < n_records; ++r) {
      GruTrainRecord rec;
      int len = 1 + static_cast<int>(rng.below(4));
      for (int k = 0; k < len; ++k) rec.window.push_back(static_cast<int>(rng.below(catalog)));
      rec.label = static_cast<int>(rng.below(catalog));
      rec.negatives = sample_negatives(rec.label, catalog, 3, rng);
      records.push_back(std::move(rec));
    }
    double lambda = rng.uniform() * 0.01;
    double lib = training_loss(model, features, records, lambda);
    double manual = manual_gru_loss(model, features, records, lambda);
    worst_gru = std::max(worst_gru, std::abs(lib - manual));
  }

  double elapsed = seconds_since(start);
  bool pass = worst_graph <= 1e-12 && worst_sdne <= 1e-9 && worst_gru <= 1e-9;
  return {pass, fmt("graph vs brute force %.2e (50 corpora), objectives vs straight-line "
                    "%.2e/%.2e (20+20 instances, %.1fs)",
                    worst_graph, worst_sdne, worst_gru, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 3: ranking metrics against a frozen fixture including the
// rank == N boundary, and a uniform random scorer whose HR@10 over a
// 1,000-item catalog must land within 3 sigma of 10/1000 across 10,000
// records, within 30 seconds.

class DescendingScorer : public Recommender {
 public:
  explicit DescendingScorer(int catalog) : catalog_(catalog) {}
  std::string name() const override { return "descending"; }
  Eigen::VectorXd score(const RankingQuery&) const override {
    Eigen::VectorXd s(catalog_);
    for (int i = 0; i < catalog_; ++i) s[i] = -static_cast<double>(i);
    return s;
  }

 private:
  int catalog_;
};

// Scores derived only from the query's user index, so calls are pure and
// parallel ranking stays race free.
class UniformScorer : public Recommender {
 public:
  explicit UniformScorer(int catalog) : catalog_(catalog) {}
  std::string name() const override { return "uniform"; }
  Eigen::VectorXd score(const RankingQuery& query) const override {
    Rng rng = Rng(987654321).split("record-" + std::to_string(query.user));
    Eigen::VectorXd s(catalog_);
    for (int i = 0; i < catalog_; ++i) s[i] = rng.uniform();
    return s;
  }

 private:
  int catalog_;
};

Outcome criterion_metrics() {
  auto start = Clock::now();

  struct Single {
    int rank, n;
    double hr, mrr, ndcg;
  };
  const std::vector<Single> singles = {
      {1, 5, 1, 1, 1},
      {3, 5, 1, 0.3333333333333333, 0.5},
      {5, 5, 1, 0.2, 0.38685280723454163},
      {6, 5, 0, 0, 0},
      {10, 10, 1, 0.1, 0.2890648263178879},
      {11, 10, 0, 0, 0},
      {1, 1, 1, 1, 1},
      {2, 1, 0, 0, 0},
      {20, 20, 1, 0.05, 0.227670248696953},
      {21, 20, 0, 0, 0},
  };
  for (const auto& s : singles) {
    if (std::abs(hit_rate(s.rank, s.n) - s.hr) > 1e-12 ||
        std::abs(reciprocal_rank(s.rank, s.n) - s.mrr) > 1e-12 ||
        std::abs(ndcg(s.rank, s.n) - s.ndcg) > 1e-12) {
      return {false, fmt("single-record metric mismatch at rank %d, N %d", s.rank, s.n)};
    }
  }

  const std::vector<int> ranks = {1, 2, 3, 5, 5,  6,  8,  10, 10, 11,
                                  12, 15, 1, 4, 7, 9, 13, 18, 20, 25};
  std::vector<RankingQuery> fixture;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    RankingQuery q;
    q.user = static_cast<int>(i);
    q.label = ranks[i] - 1;  // scores are minus the index
    q.window = {q.label};
    fixture.push_back(std::move(q));
  }
  DescendingScorer desc(30);
  auto report = evaluate(desc, fixture, EvalOptions{});
  const std::map<int, std::array<double, 3>> frozen = {
      {5, {35.0, 17.416666666666668, 21.67655963056967}},
      {10, {65.0, 21.14484126984127, 31.097384858203874}},
      {15, {85.0, 22.73400210900211, 36.40653803378209}},
      {20, {95.0, 23.261779886779888, 38.72193384410004}},
  };
  for (const auto& [n, cell] : frozen) {
    const auto& have = report.by_n.at(n);
    if (std::abs(have.hr - cell[0]) > 1e-9 || std::abs(have.mrr - cell[1]) > 1e-9 ||
        std::abs(have.ndcg - cell[2]) > 1e-9) {
      return {false, fmt("20-record fixture mismatch at N %d", n)};
    }
  }

  const int catalog = 1000, n_records = 10000;
  Rng labels(1889);
  std::vector<RankingQuery> random_queries;
  for (int i = 0; i < n_records; ++i) {
    RankingQuery q;
    q.user = i;
    q.label = static_cast<int>(labels.below(catalog));
    q.window = {q.label};
    random_queries.push_back(std::move(q));
  }
  UniformScorer uniform(catalog);
  EvalOptions opts;
  opts.n_list = {10};
  double frac = evaluate(uniform, random_queries, opts).by_n.at(10).hr / 100.0;

  // 0.01 +- 3 * sqrt(0.01 * 0.99 / 10000)
  const double lo = 0.007015037688680141, hi = 0.01298496231131986;
  double elapsed = seconds_since(start);
  bool pass = frac >= lo && frac <= hi && elapsed < 30.0;
  return {pass, fmt("fixture metrics exact; uniform scorer HR@10 %.4f in [%.4f, %.4f] "
                    "(%.1fs, budget 30s)",
                    frac, lo, hi, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 4: embeddings trained on two disjoint 10-cliques (weight 1
// inside, nothing across) separate the cliques with nearest-neighbor
// purity at least 0.9, within 60 seconds.

Outcome criterion_clique_separation() {
  auto start = Clock::now();
  auto graph = clique_graph(2, 10, 1.0);

  SdneConfig cfg;
  cfg.layer_sizes = {20, 12, 4};
  cfg.alpha = 1.0;
  cfg.beta = 5.0;
  cfg.learning_rate = 0.1;
  cfg.epochs = 200;
  cfg.batch_size = 5;
  cfg.seed = 7;
  auto result = train_sdne(graph, cfg);

  int pure = 0;
  for (int p = 0; p < 20; ++p) {
    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 20; ++q) {
      if (q == p) continue;
      double d = (result.embeddings.row(p) - result.embeddings.row(q)).squaredNorm();
      if (d < best) {
        best = d;
        nearest = q;
      }
    }
    if (nearest / 10 == p / 10) ++pure;
  }
  double purity = pure / 20.0;
  double elapsed = seconds_since(start);
  bool pass = purity >= 0.9 && elapsed < 60.0;
  return {pass, fmt("nearest-neighbor purity %.2f (threshold 0.90) over 2x10 cliques "
                    "(%.1fs, budget 60s)",
                    purity, elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 5: end to end on 200 synthetic users following a first-order
// transition table with 5 percent noise. Held-out HR@1 must reach 0.95 and
// beat the popularity baseline by 0.3 absolute, within 5 minutes.

Outcome criterion_end_to_end() {
  auto start = Clock::now();
  auto corpus = transition_corpus(200, 20, 12, 3, 0.05, 314159);

  auto split = chronological_split(corpus, SplitSpec{});
  TextNormalizer normalizer;
  auto vocab = TopicVocabulary::build(corpus);
  auto vectors = build_topic_vectors(corpus, vocab, normalizer);
  auto graph = build_graph(vectors.vectors, 0.3);

  SdneConfig sdne_cfg;
  sdne_cfg.layer_sizes = {20, 16, 8};
  sdne_cfg.learning_rate = 0.05;
  sdne_cfg.epochs = 80;
  sdne_cfg.batch_size = 16;
  sdne_cfg.seed = 11;
  auto sdne_res = train_sdne(graph, sdne_cfg);

  std::vector<int> all_repos(corpus.repos.size());
  std::iota(all_repos.begin(), all_repos.end(), 0);
  auto scalers = fit_scalers(corpus, all_repos);
  auto features = build_feature_matrix(corpus, sdne_res.embeddings, scalers);

  auto records = build_training_records(split.train, 4, WindowMode::kFixed);
  GruConfig gru_cfg;
  gru_cfg.user_dim = 32;
  gru_cfg.window = 4;
  gru_cfg.negatives = 10;
  gru_cfg.learning_rate = 0.05;
  gru_cfg.max_epochs = 800;
  gru_cfg.batch_size = 64;
  gru_cfg.seed = 99;
  auto gru_res = train_gru(features, records, gru_cfg);

  auto queries = build_ranking_queries(corpus, split, Split::kTest, 4, false);
  GruRecommender rec(gru_res.model, features);
  PopRecommender pop(split.train);
  EvalOptions opts;
  opts.n_list = {1};
  double hr = evaluate(rec, queries, opts).by_n.at(1).hr / 100.0;
  double hr_pop = evaluate(pop, queries, opts).by_n.at(1).hr / 100.0;

  double elapsed = seconds_since(start);
  bool pass = hr >= 0.95 && hr - hr_pop >= 0.3 && elapsed < 300.0;
  return {pass, fmt("held-out HR@1 %.3f (threshold 0.95), popularity baseline %.3f, "
                    "margin %.3f (threshold 0.30) on %zu queries (%.1fs, budget 300s)",
                    hr, hr_pop, hr - hr_pop, queries.size(), elapsed)};
}

// ---------------------------------------------------------------------------
// Criterion 6: seven invariant families, 100 random cases each.

Outcome criterion_invariants() {
  auto start = Clock::now();
  std::vector<std::string> failed;
  Rng rng(271828);

  // Graph: zero diagonal, symmetry, weights within [epsilon, 1].
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      int n = 2 + static_cast<int>(rng.below(9));
      int dim = 3 + static_cast<int>(rng.below(8));
      std::vector<TopicVector> vectors;
      for (int r = 0; r < n; ++r) {
        vectors.push_back(random_topic_vector(rng, r, dim, rng.uniform(0.2, 0.8)));
      }
      double eps = rng.uniform(0.05, 0.95);
      auto g = build_graph(vectors, eps);
      for (int p = 0; p < n && ok; ++p) {
        if (g.weight(p, p) != 0.0) ok = false;
        for (const auto& [q, w] : g.rows[static_cast<std::size_t>(p)]) {
          if (q == p || w < eps || w > 1.0 + 1e-12 || g.weight(q, p) != w) ok = false;
        }
      }
    }
    if (!ok) failed.push_back("graph");
  }

  // Recurrent state stays inside the unit cube even for scaled-up weights.
  // tanh saturates to exactly 1.0 in floating point, so the bound is closed.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      int du = 2 + static_cast<int>(rng.below(4));
      int dr = 2 + static_cast<int>(rng.below(4));
      auto model = GruModel::init(du, dr, rng);
      double blow = rng.uniform(1.0, 30.0);
      model.w_in *= blow;
      model.w_z *= blow;
      model.w_r *= blow;
      model.w_u *= blow;
      int catalog = 5;
      Eigen::MatrixXd features(catalog, dr);
      for (int i = 0; i < catalog; ++i) {
        for (int j = 0; j < dr; ++j) features(i, j) = rng.uniform(-10.0, 10.0);
      }
      std::vector<int> window;
      int len = 1 + static_cast<int>(rng.below(6));
      for (int k = 0; k < len; ++k) window.push_back(static_cast<int>(rng.below(catalog)));
      auto u = user_representation(model, features, window);
      for (int i = 0; i < du; ++i) {
        if (!std::isfinite(u[i]) || std::abs(u[i]) > 1.0 + 1e-12) ok = false;
      }
    }
    if (!ok) failed.push_back("hidden-state");
  }

  // Softmax: non-negative, sums to one, invariant under shifts.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      int n = 2 + static_cast<int>(rng.below(10));
      Eigen::VectorXd logits(n);
      for (int i = 0; i < n; ++i) logits[i] = rng.uniform(-8.0, 8.0);
      auto p = softmax(logits);
      if (std::abs(p.sum() - 1.0) > 1e-12 || p.minCoeff() < 0.0) ok = false;
      Eigen::VectorXd shifted = (logits.array() + rng.uniform(-500.0, 500.0)).matrix();
      if ((softmax(shifted) - p).cwiseAbs().maxCoeff() > 1e-12) ok = false;
    }
    if (!ok) failed.push_back("softmax");
  }

  // Ranking: adding a constant to every score never moves any rank.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      int n = 2 + static_cast<int>(rng.below(49));
      Eigen::VectorXd scores(n);
      for (int i = 0; i < n; ++i) scores[i] = rng.uniform(-5.0, 5.0);
      if (rng.uniform() < 0.3) scores[static_cast<int>(rng.below(n))] = scores[0];  // force ties
      int label = static_cast<int>(rng.below(n));
      Eigen::VectorXd shifted = (scores.array() + rng.uniform(-100.0, 100.0)).matrix();
      if (rank_of_label(scores, label) != rank_of_label(shifted, label)) ok = false;
    }
    if (!ok) failed.push_back("ranking-shift");
  }

  // Split: tags partition each sequence into contiguous train/valid/test.
  {
    bool ok = true;
    SplitSpec spec;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      Corpus c = random_corpus(rng, 2 + static_cast<int>(rng.below(8)),
                               3 + static_cast<int>(rng.below(5)), 3, 12);
      auto res = chronological_split(c, spec);
      for (std::size_t u = 0; u < c.users.size() && ok; ++u) {
        const auto& tags = res.tags[u];
        if (tags.size() != c.users[u].interactions.size()) ok = false;
        std::size_t train_n = 0, valid_n = 0, test_n = 0;
        int phase = 0;
        for (auto t : tags) {
          int code = t == Split::kTrain ? 0 : t == Split::kValid ? 1 : 2;
          if (code < phase) ok = false;
          phase = code;
          (code == 0 ? train_n : code == 1 ? valid_n : test_n) += 1;
        }
        auto n = static_cast<double>(tags.size());
        if (train_n != std::max<std::size_t>(
                           1, static_cast<std::size_t>(std::floor(spec.train_fraction * n)))) {
          ok = false;
        }
        if (train_n + valid_n + test_n != tags.size()) ok = false;
      }
    }
    if (!ok) failed.push_back("split-partition");
  }

  // Sparsify: per-user and per-repository floors survive any level.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      Corpus c = random_corpus(rng, 4 + static_cast<int>(rng.below(7)),
                               3 + static_cast<int>(rng.below(5)), 4, 12);
      SparsitySpec spec;
      spec.level = trial % 2 == 0 ? SparsityLevel::kAll : SparsityLevel::kHalf;
      spec.min_user_repos = 3;
      spec.min_repo_users = 1;
      spec.seed = rng.next();
      std::map<std::string, std::set<int>> before;
      for (const auto& u : c.users) {
        for (const auto& it : u.interactions) before[u.id].insert(it.repo);
      }
      auto res = sparsify(c, spec);
      if (res.corpus.interaction_count() + res.deleted != c.interaction_count()) ok = false;
      for (const auto& u : res.corpus.users) {
        std::set<int> distinct;
        for (const auto& it : u.interactions) distinct.insert(it.repo);
        auto floor_for_user = std::min<std::size_t>(before[u.id].size(), 3);
        if (distinct.size() < floor_for_user) ok = false;
      }
    }
    if (!ok) failed.push_back("sparsify-floors");
  }

  // Metrics: never decrease when the cutoff N grows.
  {
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      int rank = 1 + static_cast<int>(rng.below(40));
      int n1 = 1 + static_cast<int>(rng.below(30));
      int n2 = n1 + static_cast<int>(rng.below(10));
      if (hit_rate(rank, n1) > hit_rate(rank, n2) ||
          reciprocal_rank(rank, n1) > reciprocal_rank(rank, n2) ||
          ndcg(rank, n1) > ndcg(rank, n2)) {
        ok = false;
      }
    }
    if (!ok) failed.push_back("metric-monotonicity");
  }

  double elapsed = seconds_since(start);
  if (failed.empty()) {
    return {true, fmt("seven suites x 100 random cases all hold (%.1fs)", elapsed)};
  }
  std::string names;
  for (const auto& name : failed) names += " " + name;
  return {false, "violated:" + names};
}

// ---------------------------------------------------------------------------
// Criterion 7: two full pipeline runs with the same seed and configuration
// produce bit-identical artifacts.

Outcome criterion_determinism() {
  auto start = Clock::now();
  TempDir dir;
  auto corpus_dir = dir / "corpus";
  std::filesystem::create_directories(corpus_dir);
  {
    Rng rng(5);
    save_corpus(random_corpus(rng, 12, 10, 6, 14), CorpusPaths::in_dir(corpus_dir));
  }

  RunConfig config;
  config.in_dir = corpus_dir;
  config.min_user_repos = 2;
  config.min_repo_users = 1;
  config.embedding_dim = 4;
  config.sdne_hidden = {8};
  config.sdne_epochs = 6;
  config.sdne_batch_size = 4;
  config.user_dim = 6;
  config.window = 3;
  config.negatives = 3;
  config.max_epochs = 4;
  config.batch_size = 16;
  config.top_n = {1, 5, 10};
  config.sparsity_level = "half";

  auto run = [&](const std::filesystem::path& out) {
    auto c = config;
    c.out_dir = out;
    std::ostringstream log;
    cmd_build_graph(c, log);
    cmd_train_sdne(c, log);
    cmd_train_rec(c, log);
    cmd_evaluate(c, log);
    cmd_recommend(c, "user000", 5, log);
    cmd_sparsify(c, log);
  };
  run(dir / "a");
  run(dir / "b");

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  std::vector<std::string> files = {
      "graph.tsv",       "embeddings.tsv",     "sdne_model.ckpt",
      "sdne_train_log.tsv", "gru_model.ckpt",  "train_log.tsv",
      "splits.tsv",      "metrics.json",       "recommendations.tsv",
      "sparsify_summary.txt", "sparsified/repos.jsonl", "sparsified/users.jsonl",
      "sparsified/interactions.jsonl"};
  std::vector<std::string> mismatched;
  for (const auto& f : files) {
    auto a = slurp(dir / "a" / f);
    auto b = slurp(dir / "b" / f);
    if (a.empty() || a != b) mismatched.push_back(f);
  }

  double elapsed = seconds_since(start);
  if (mismatched.empty()) {
    return {true, fmt("%zu artifacts bit-identical across two runs (%.1fs)", files.size(),
                      elapsed)};
  }
  std::string names;
  for (const auto& f : mismatched) names += " " + f;
  return {false, "differing or empty artifacts:" + names};
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    Outcome (*fn)();
  };
  const std::vector<Entry> criteria = {
      {"analytic gradients match central finite differences", criterion_gradients},
      {"graph and objectives match independent reimplementations", criterion_exact_oracles},
      {"ranking metrics match frozen and statistical oracles", criterion_metrics},
      {"clique embeddings separate with high purity", criterion_clique_separation},
      {"end-to-end pipeline learns planted transitions", criterion_end_to_end},
      {"invariant suites hold on random inputs", criterion_invariants},
      {"identical runs produce bit-identical artifacts", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] criterion %zu: %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].title, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures;
}
