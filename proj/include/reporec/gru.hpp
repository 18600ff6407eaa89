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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reporec/checkpoint.hpp"
#include "reporec/corpus.hpp"
#include "reporec/eval.hpp"
#include "reporec/rng.hpp"

namespace reporec {

// Plain min-max normalization fitted on training counts; out-of-range
// values at inference time are clamped into [0, 1].
struct MinMaxScaler {
  double min = 0.0;
  double max = 0.0;

  static MinMaxScaler fit(std::span<const double> values);
  double scale(double x) const;
};

// Fit-and-apply convenience; a constant list maps to all zeros.
std::vector<double> minmax_scale(std::span<const double> values);

// Graph embedding followed by the three scaled popularity counts.
Eigen::VectorXd fuse_features(const Eigen::VectorXd& embedding,
                              const Eigen::VectorXd& scaled_counts);

struct FeatureScalers {
  MinMaxScaler watches, stars, forks;
};

// Statistics over the given repositories only (normally those that appear
// in the training split).
FeatureScalers fit_scalers(const Corpus& corpus, std::span<const int> repo_subset);

// One fused row per repository: embedding columns then watches/stars/forks.
Eigen::MatrixXd build_feature_matrix(const Corpus& corpus, const Eigen::MatrixXd& embeddings,
                                     const FeatureScalers& scalers);

struct GruConfig {
  int user_dim = 64;
  int window = 4;
  int negatives = 10;
  double lambda = 1e-4;  // L2 coefficient on all four matrices
  double learning_rate = 0.009;
  int max_epochs = 100;
  int batch_size = 128;
  std::uint64_t seed = 1;

  void validate() const;
};

// Gated recurrent scorer. The input projection doubles as the candidate
// transform, and none of the matrices carry bias terms.
struct GruModel {
  Eigen::MatrixXd w_in;           // user_dim x input_dim
  Eigen::MatrixXd w_z, w_r, w_u;  // user_dim x 2 * user_dim

  static GruModel init(int user_dim, int input_dim, Rng& rng);

  int user_dim() const { return static_cast<int>(w_in.rows()); }
  int input_dim() const { return static_cast<int>(w_in.cols()); }
  std::size_t parameter_count() const;

  Eigen::VectorXd transform_input(const Eigen::VectorXd& r) const;
};

// Intermediate values of one recurrence step, kept for backpropagation.
struct GruStepCache {
  Eigen::VectorXd u_prev, input, rh, z, g, cand, u_next;
};

// One update: rh = sigmoid(W_in r); z and g gate over [u, rh]; the
// candidate state is tanh over [g . u, rh]; the new state keeps z of the
// old state and (1 - z) of the candidate.
GruStepCache gru_step(const GruModel& model, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& input);

// Folds gru_step over the window in chronological order from the zero state.
Eigen::VectorXd user_representation(const GruModel& model,
                                    const std::vector<Eigen::VectorXd>& window);
Eigen::VectorXd user_representation(const GruModel& model, const Eigen::MatrixXd& features,
                                    std::span<const int> window);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Dot products between the user state and each transformed candidate.
Eigen::VectorXd candidate_logits(const GruModel& model, const Eigen::VectorXd& u,
                                 const std::vector<Eigen::VectorXd>& candidates);
Eigen::VectorXd candidate_logits(const GruModel& model, const Eigen::VectorXd& u,
                                 const Eigen::MatrixXd& features, std::span<const int> candidates);

// Softmax over the supplied candidate set.
Eigen::VectorXd score_candidates(const GruModel& model, const Eigen::VectorXd& u,
                                 const std::vector<Eigen::VectorXd>& candidates);

// k distinct repositories drawn uniformly from [0, catalog_size), none equal
// to label. Requires catalog_size > k.
std::vector<int> sample_negatives(int label, int catalog_size, int k, Rng& rng);

// A training record with its sampled candidate set attached.
struct GruTrainRecord {
  std::vector<int> window;  // repo indices, chronological
  int label = -1;
  std::vector<int> negatives;
};

// Cross-entropy over each record's candidate set (label first) plus
// lambda times the squared norm of all parameters.
double training_loss(const GruModel& model, const Eigen::MatrixXd& features,
                     std::span<const GruTrainRecord> records, double lambda);

struct GruGradients {
  Eigen::MatrixXd w_in, w_z, w_r, w_u;

  static GruGradients zeros_like(const GruModel& model);
  bool finite(std::string* which) const;
};

struct GruBackwardResult {
  GruGradients grads;
  double loss = 0.0;  // training_loss of the batch at current parameters
};

// Analytic gradients of training_loss over the batch: softmax, the unrolled
// recurrence, and both uses of W_in (window inputs and candidates). The
// regularizer contributes 2 * lambda * theta once per call.
GruBackwardResult backward(const GruModel& model, const Eigen::MatrixXd& features,
                           std::span<const GruTrainRecord> records, double lambda);

// SGD update in place; returns the batch loss before the step.
double backward_and_step(GruModel& model, const Eigen::MatrixXd& features,
                         std::span<const GruTrainRecord> records, double lambda,
                         double learning_rate);

struct GruTrainResult {
  GruModel model;
  std::vector<double> epoch_losses;
};

using GruEpochCallback = std::function<void(int epoch, double loss, const GruModel& model)>;

// Shuffled minibatch SGD with fresh uniformly sampled negatives for every
// record each epoch. Deterministic for a fixed config.
GruTrainResult train_gru(const Eigen::MatrixXd& features,
                         const std::vector<TrainingRecord>& records, const GruConfig& config,
                         const GruEpochCallback& on_epoch = {});

// Full-catalog ranking by logit, ties broken by ascending repository index.
std::vector<std::pair<int, double>> recommend_top_n(const GruModel& model,
                                                    const Eigen::MatrixXd& features,
                                                    std::span<const int> window, int n);

// Frozen trained model behind the evaluation interface.
class GruRecommender : public Recommender {
 public:
  GruRecommender(GruModel model, Eigen::MatrixXd features);

  std::string name() const override { return "gru"; }
  Eigen::VectorXd score(const RankingQuery& query) const override;

 private:
  GruModel model_;
  Eigen::MatrixXd features_;
  Eigen::MatrixXd transformed_;  // sigmoid(features * w_in^T), one row per repo
};

// Checkpoint round trip, kind "gru-model".
Checkpoint to_checkpoint(const GruModel& model, const std::string& config_hash,
                         std::uint64_t seed);
GruModel gru_model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace reporec
