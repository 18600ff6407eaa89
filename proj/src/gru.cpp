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
#include "reporec/gru.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reporec/errors.hpp"
#include "reporec/strings.hpp"

namespace reporec {
namespace {

Eigen::VectorXd sigmoid_v(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::MatrixXd glorot(int rows, int cols, Rng& rng) {
  double bound = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-bound, bound);
  }
  return w;
}

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

Eigen::VectorXd feature_row(const Eigen::MatrixXd& features, int repo) {
  if (repo < 0 || repo >= features.rows()) {
    throw ValidationError("repository index " + std::to_string(repo) +
                          " outside the feature table");
  }
  return features.row(repo).transpose();
}

double w_squared_norm(const GruModel& model) {
  return model.w_in.squaredNorm() + model.w_z.squaredNorm() + model.w_r.squaredNorm() +
         model.w_u.squaredNorm();
}

// Cross-entropy forward pass for one record; caches everything backward needs.
struct RecordForward {
  std::vector<GruStepCache> steps;
  std::vector<int> candidates;          // label first
  std::vector<Eigen::VectorXd> rh_cand;  // transformed candidate vectors
  Eigen::VectorXd probs;
  double ce = 0.0;
};

RecordForward run_record_forward(const GruModel& model, const Eigen::MatrixXd& features,
                                 const GruTrainRecord& record) {
  if (record.window.empty()) throw ValidationError("training record has an empty window");
  RecordForward fw;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.user_dim());
  for (int repo : record.window) {
    fw.steps.push_back(gru_step(model, u, feature_row(features, repo)));
    u = fw.steps.back().u_next;
  }
  fw.candidates.push_back(record.label);
  fw.candidates.insert(fw.candidates.end(), record.negatives.begin(), record.negatives.end());
  Eigen::VectorXd logits(fw.candidates.size());
  for (std::size_t c = 0; c < fw.candidates.size(); ++c) {
    fw.rh_cand.push_back(model.transform_input(feature_row(features, fw.candidates[c])));
    logits[static_cast<Eigen::Index>(c)] = u.dot(fw.rh_cand.back());
  }
  fw.probs = softmax(logits);
  fw.ce = -std::log(fw.probs[0]);
  return fw;
}

}  // namespace

MinMaxScaler MinMaxScaler::fit(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot fit a scaler on an empty list");
  MinMaxScaler s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

double MinMaxScaler::scale(double x) const {
  if (max <= min) return 0.0;
  return std::clamp((x - min) / (max - min), 0.0, 1.0);
}

std::vector<double> minmax_scale(std::span<const double> values) {
  auto s = MinMaxScaler::fit(values);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(s.scale(v));
  return out;
}

Eigen::VectorXd fuse_features(const Eigen::VectorXd& embedding,
                              const Eigen::VectorXd& scaled_counts) {
  if (scaled_counts.size() != 3) {
    throw ValidationError("expected exactly 3 scaled count features, got " +
                          std::to_string(scaled_counts.size()));
  }
  return concat(embedding, scaled_counts);
}

FeatureScalers fit_scalers(const Corpus& corpus, std::span<const int> repo_subset) {
  if (repo_subset.empty()) throw ValidationError("scaler subset must be non-empty");
  std::vector<double> watches, stars, forks;
  watches.reserve(repo_subset.size());
  stars.reserve(repo_subset.size());
  forks.reserve(repo_subset.size());
  for (int r : repo_subset) {
    const auto& repo = corpus.repos.at(static_cast<std::size_t>(r));
    watches.push_back(static_cast<double>(repo.watches));
    stars.push_back(static_cast<double>(repo.stars));
    forks.push_back(static_cast<double>(repo.forks));
  }
  return {MinMaxScaler::fit(watches), MinMaxScaler::fit(stars), MinMaxScaler::fit(forks)};
}

Eigen::MatrixXd build_feature_matrix(const Corpus& corpus, const Eigen::MatrixXd& embeddings,
                                     const FeatureScalers& scalers) {
  if (static_cast<std::size_t>(embeddings.rows()) != corpus.repos.size()) {
    throw ValidationError("embedding table has " + std::to_string(embeddings.rows()) +
                          " rows for " + std::to_string(corpus.repos.size()) + " repositories");
  }
  Eigen::MatrixXd out(embeddings.rows(), embeddings.cols() + 3);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const auto& repo = corpus.repos[static_cast<std::size_t>(i)];
    out.row(i).head(embeddings.cols()) = embeddings.row(i);
    out(i, embeddings.cols()) = scalers.watches.scale(static_cast<double>(repo.watches));
    out(i, embeddings.cols() + 1) = scalers.stars.scale(static_cast<double>(repo.stars));
    out(i, embeddings.cols() + 2) = scalers.forks.scale(static_cast<double>(repo.forks));
  }
  return out;
}

void GruConfig::validate() const {
  if (user_dim < 1) throw ValidationError("user embedding size must be at least 1");
  if (window < 1) throw ValidationError("window length must be at least 1");
  if (negatives < 1) throw ValidationError("negative sample count must be at least 1");
  if (lambda < 0.0) throw ValidationError("lambda must be non-negative");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (max_epochs < 0) throw ValidationError("epoch count must be non-negative");
  if (batch_size < 1) throw ValidationError("batch size must be at least 1");
}

GruModel GruModel::init(int user_dim, int input_dim, Rng& rng) {
  if (user_dim < 1 || input_dim < 1) throw ValidationError("model dimensions must be positive");
  GruModel m;
  m.w_in = glorot(user_dim, input_dim, rng);
  m.w_z = glorot(user_dim, 2 * user_dim, rng);
  m.w_r = glorot(user_dim, 2 * user_dim, rng);
  m.w_u = glorot(user_dim, 2 * user_dim, rng);
  return m;
}

std::size_t GruModel::parameter_count() const {
  return static_cast<std::size_t>(w_in.size() + w_z.size() + w_r.size() + w_u.size());
}

Eigen::VectorXd GruModel::transform_input(const Eigen::VectorXd& r) const {
  if (r.size() != input_dim()) {
    throw ValidationError("input vector has length " + std::to_string(r.size()) + ", expected " +
                          std::to_string(input_dim()));
  }
  return sigmoid_v(w_in * r);
}

GruStepCache gru_step(const GruModel& model, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& input) {
  if (u.size() != model.user_dim()) {
    throw ValidationError("state vector has length " + std::to_string(u.size()) + ", expected " +
                          std::to_string(model.user_dim()));
  }
  GruStepCache c;
  c.u_prev = u;
  c.input = input;
  c.rh = model.transform_input(input);
  Eigen::VectorXd ur = concat(u, c.rh);
  c.z = sigmoid_v(model.w_z * ur);
  c.g = sigmoid_v(model.w_r * ur);
  c.cand = (model.w_u * concat(c.g.cwiseProduct(u), c.rh)).array().tanh();
  c.u_next = c.z.cwiseProduct(u) + (1.0 - c.z.array()).matrix().cwiseProduct(c.cand);
  if (!c.u_next.allFinite()) throw TrainingError("non-finite hidden state");
  return c;
}

Eigen::VectorXd user_representation(const GruModel& model,
                                    const std::vector<Eigen::VectorXd>& window) {
  if (window.empty()) throw ValidationError("window must contain at least one repository");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.user_dim());
  for (const auto& r : window) u = gru_step(model, u, r).u_next;
  return u;
}

Eigen::VectorXd user_representation(const GruModel& model, const Eigen::MatrixXd& features,
                                    std::span<const int> window) {
  if (window.empty()) throw ValidationError("window must contain at least one repository");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(model.user_dim());
  for (int repo : window) u = gru_step(model, u, feature_row(features, repo)).u_next;
  return u;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) throw ValidationError("softmax needs at least one logit");
  Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd e = shifted.array().exp();
  return e / e.sum();
}

Eigen::VectorXd candidate_logits(const GruModel& model, const Eigen::VectorXd& u,
                                 const std::vector<Eigen::VectorXd>& candidates) {
  if (candidates.empty()) throw ValidationError("candidate set must be non-empty");
  Eigen::VectorXd logits(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    logits[static_cast<Eigen::Index>(c)] = u.dot(model.transform_input(candidates[c]));
  }
  return logits;
}

Eigen::VectorXd candidate_logits(const GruModel& model, const Eigen::VectorXd& u,
                                 const Eigen::MatrixXd& features,
                                 std::span<const int> candidates) {
  if (candidates.empty()) throw ValidationError("candidate set must be non-empty");
  Eigen::VectorXd logits(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    logits[static_cast<Eigen::Index>(c)] =
        u.dot(model.transform_input(feature_row(features, candidates[c])));
  }
  return logits;
}

Eigen::VectorXd score_candidates(const GruModel& model, const Eigen::VectorXd& u,
                                 const std::vector<Eigen::VectorXd>& candidates) {
  return softmax(candidate_logits(model, u, candidates));
}

std::vector<int> sample_negatives(int label, int catalog_size, int k, Rng& rng) {
  if (catalog_size <= k) {
    throw ValidationError("catalog of " + std::to_string(catalog_size) +
                          " repositories cannot supply " + std::to_string(k) + " negatives");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(out.size()) < k) {
    int cand = static_cast<int>(rng.below(static_cast<std::uint64_t>(catalog_size)));
    if (cand == label) continue;
    if (std::find(out.begin(), out.end(), cand) != out.end()) continue;
    out.push_back(cand);
  }
  return out;
}

double training_loss(const GruModel& model, const Eigen::MatrixXd& features,
                     std::span<const GruTrainRecord> records, double lambda) {
  double loss = 0.0;
  for (const auto& record : records) {
    loss += run_record_forward(model, features, record).ce;
  }
  loss += lambda * w_squared_norm(model);
  return loss;
}

GruGradients GruGradients::zeros_like(const GruModel& model) {
  GruGradients g;
  g.w_in = Eigen::MatrixXd::Zero(model.w_in.rows(), model.w_in.cols());
  g.w_z = Eigen::MatrixXd::Zero(model.w_z.rows(), model.w_z.cols());
  g.w_r = Eigen::MatrixXd::Zero(model.w_r.rows(), model.w_r.cols());
  g.w_u = Eigen::MatrixXd::Zero(model.w_u.rows(), model.w_u.cols());
  return g;
}

bool GruGradients::finite(std::string* which) const {
  auto bad = [&](const Eigen::MatrixXd& m, const char* name) {
    if (!m.allFinite()) {
      if (which) *which = name;
      return true;
    }
    return false;
  };
  return !(bad(w_in, "W_in") || bad(w_z, "W_z") || bad(w_r, "W_r") || bad(w_u, "W_u"));
}

GruBackwardResult backward(const GruModel& model, const Eigen::MatrixXd& features,
                           std::span<const GruTrainRecord> records, double lambda) {
  if (records.empty()) throw ValidationError("batch must be non-empty");
  const int du = model.user_dim();
  GruBackwardResult res;
  res.grads = GruGradients::zeros_like(model);

  for (const auto& record : records) {
    auto fw = run_record_forward(model, features, record);
    res.loss += fw.ce;

    // Softmax with a one-hot target at slot 0.
    Eigen::VectorXd dlogit = fw.probs;
    dlogit[0] -= 1.0;

    Eigen::VectorXd u_t = fw.steps.back().u_next;
    Eigen::VectorXd du_t = Eigen::VectorXd::Zero(du);
    for (std::size_t c = 0; c < fw.candidates.size(); ++c) {
      const auto& rh = fw.rh_cand[c];
      double d = dlogit[static_cast<Eigen::Index>(c)];
      du_t += d * rh;
      Eigen::VectorXd da = d * u_t.cwiseProduct(rh).cwiseProduct((1.0 - rh.array()).matrix());
      res.grads.w_in += da * feature_row(features, fw.candidates[c]).transpose();
    }

    Eigen::VectorXd dnext = du_t;
    for (auto it = fw.steps.rbegin(); it != fw.steps.rend(); ++it) {
      const auto& s = *it;
      Eigen::VectorXd dz = dnext.cwiseProduct(s.u_prev - s.cand);
      Eigen::VectorXd dcand = dnext.cwiseProduct((1.0 - s.z.array()).matrix());
      Eigen::VectorXd dprev = dnext.cwiseProduct(s.z);

      Eigen::VectorXd da_u = dcand.cwiseProduct((1.0 - s.cand.array().square()).matrix());
      res.grads.w_u += da_u * concat(s.g.cwiseProduct(s.u_prev), s.rh).transpose();
      Eigen::VectorXd h_u = model.w_u.transpose() * da_u;
      Eigen::VectorXd dgu = h_u.head(du);
      Eigen::VectorXd drh = h_u.tail(du);
      Eigen::VectorXd dg = dgu.cwiseProduct(s.u_prev);
      dprev += dgu.cwiseProduct(s.g);

      Eigen::VectorXd ur = concat(s.u_prev, s.rh);
      Eigen::VectorXd da_g = dg.cwiseProduct(s.g).cwiseProduct((1.0 - s.g.array()).matrix());
      res.grads.w_r += da_g * ur.transpose();
      Eigen::VectorXd h_g = model.w_r.transpose() * da_g;
      dprev += h_g.head(du);
      drh += h_g.tail(du);

      Eigen::VectorXd da_z = dz.cwiseProduct(s.z).cwiseProduct((1.0 - s.z.array()).matrix());
      res.grads.w_z += da_z * ur.transpose();
      Eigen::VectorXd h_z = model.w_z.transpose() * da_z;
      dprev += h_z.head(du);
      drh += h_z.tail(du);

      Eigen::VectorXd din = drh.cwiseProduct(s.rh).cwiseProduct((1.0 - s.rh.array()).matrix());
      res.grads.w_in += din * s.input.transpose();

      dnext = dprev;
    }
  }

  if (lambda > 0.0) {
    res.loss += lambda * w_squared_norm(model);
    res.grads.w_in += 2.0 * lambda * model.w_in;
    res.grads.w_z += 2.0 * lambda * model.w_z;
    res.grads.w_r += 2.0 * lambda * model.w_r;
    res.grads.w_u += 2.0 * lambda * model.w_u;
  }
  return res;
}

double backward_and_step(GruModel& model, const Eigen::MatrixXd& features,
                         std::span<const GruTrainRecord> records, double lambda,
                         double learning_rate) {
  auto res = backward(model, features, records, lambda);
  std::string which;
  if (!res.grads.finite(&which)) {
    throw TrainingError("non-finite gradient in " + which);
  }
  model.w_in -= learning_rate * res.grads.w_in;
  model.w_z -= learning_rate * res.grads.w_z;
  model.w_r -= learning_rate * res.grads.w_r;
  model.w_u -= learning_rate * res.grads.w_u;
  return res.loss;
}

GruTrainResult train_gru(const Eigen::MatrixXd& features,
                         const std::vector<TrainingRecord>& records, const GruConfig& config,
                         const GruEpochCallback& on_epoch) {
  config.validate();
  if (records.empty()) throw ValidationError("no training records");
  const int catalog = static_cast<int>(features.rows());

  Rng root(config.seed);
  Rng init_rng = root.split("init");
  GruTrainResult out;
  out.model = GruModel::init(config.user_dim, static_cast<int>(features.cols()), init_rng);

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Rng epoch_rng = root.split("epoch-" + std::to_string(epoch));
    epoch_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::vector<GruTrainRecord> batch;
    batch.reserve(static_cast<std::size_t>(config.batch_size));
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& rec = records[order[i]];
      GruTrainRecord tr;
      tr.window = rec.window;
      tr.label = rec.label;
      tr.negatives = sample_negatives(rec.label, catalog, config.negatives, epoch_rng);
      batch.push_back(std::move(tr));
      if (batch.size() == static_cast<std::size_t>(config.batch_size) || i + 1 == order.size()) {
        epoch_loss +=
            backward_and_step(out.model, features, batch, config.lambda, config.learning_rate);
        batch.clear();
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("training diverged: loss " + format_shortest(epoch_loss) +
                          " at epoch " + std::to_string(epoch) + " (learning rate " +
                          format_shortest(config.learning_rate) + ")");
    }
    out.epoch_losses.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss, out.model);
  }
  return out;
}

std::vector<std::pair<int, double>> recommend_top_n(const GruModel& model,
                                                    const Eigen::MatrixXd& features,
                                                    std::span<const int> window, int n) {
  Eigen::VectorXd u = user_representation(model, features, window);
  Eigen::MatrixXd transformed =
      (features * model.w_in.transpose()).unaryExpr([](double v) {
        return 1.0 / (1.0 + std::exp(-v));
      });
  Eigen::VectorXd logits = transformed * u;
  return top_n_by_score(logits, n);
}

GruRecommender::GruRecommender(GruModel model, Eigen::MatrixXd features)
    : model_(std::move(model)), features_(std::move(features)) {
  transformed_ = (features_ * model_.w_in.transpose()).unaryExpr([](double v) {
    return 1.0 / (1.0 + std::exp(-v));
  });
}

Eigen::VectorXd GruRecommender::score(const RankingQuery& query) const {
  Eigen::VectorXd u = user_representation(model_, features_, query.window);
  return transformed_ * u;
}

Checkpoint to_checkpoint(const GruModel& model, const std::string& config_hash,
                         std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.kind = "gru-model";
  ckpt.config_hash = config_hash;
  ckpt.seed = seed;
  ckpt.set_meta("user_dim", model.user_dim());
  ckpt.set_meta("input_dim", model.input_dim());
  ckpt.add_matrix("w_in", model.w_in);
  ckpt.add_matrix("w_z", model.w_z);
  ckpt.add_matrix("w_r", model.w_r);
  ckpt.add_matrix("w_u", model.w_u);
  return ckpt;
}

GruModel gru_model_from_checkpoint(const Checkpoint& ckpt) {
  GruModel model;
  model.w_in = ckpt.matrix("w_in");
  model.w_z = ckpt.matrix("w_z");
  model.w_r = ckpt.matrix("w_r");
  model.w_u = ckpt.matrix("w_u");
  auto d = ckpt.meta_value("user_dim");
  auto f = ckpt.meta_value("input_dim");
  if (model.w_in.rows() != d || model.w_in.cols() != f || model.w_z.rows() != d ||
      model.w_z.cols() != 2 * d || model.w_r.rows() != d || model.w_r.cols() != 2 * d ||
      model.w_u.rows() != d || model.w_u.cols() != 2 * d) {
    throw ValidationError("gru checkpoint: matrix shapes disagree with the recorded dims");
  }
  return model;
}

}  // namespace reporec
