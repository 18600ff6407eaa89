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
#include "reporec/graph.hpp"
#include "reporec/rng.hpp"

namespace reporec {

// Autoencoder trained to place linked repositories near each other (edge
// term over encoder outputs) while reconstructing each adjacency row through
// the decoder with extra penalty beta on nonzero entries.
struct SdneConfig {
  std::vector<int> layer_sizes;  // [|R|, hidden..., embedding_dim]
  double alpha = 1.0;            // weight on the reconstruction term
  double beta = 5.0;             // reconstruction penalty on nonzero entries
  double learning_rate = 0.01;
  int epochs = 50;
  int batch_size = 128;
  double weight_decay = 0.0;  // optional L2 on parameters, off by default
  std::uint64_t seed = 1;

  void validate() const;  // throws ValidationError
};

struct SdneModel {
  std::vector<int> dims;  // encoder layer sizes, dims.front() = input width
  std::vector<Eigen::MatrixXd> enc_w;  // enc_w[k]: dims[k+1] x dims[k]
  std::vector<Eigen::VectorXd> enc_b;
  std::vector<Eigen::MatrixXd> dec_w;  // mirrored shapes, back to input width
  std::vector<Eigen::VectorXd> dec_b;

  // Glorot-uniform weights, zero biases, drawn in a fixed order from rng.
  static SdneModel init(const std::vector<int>& layer_sizes, Rng& rng);

  int input_dim() const { return dims.front(); }
  int embedding_dim() const { return dims.back(); }
  int depth() const { return static_cast<int>(dims.size()) - 1; }
  std::size_t parameter_count() const;

  // Activations of every encoder layer for one adjacency row.
  std::vector<Eigen::VectorXd> encode_layers(const Eigen::VectorXd& s) const;
  Eigen::VectorXd encode(const Eigen::VectorXd& s) const;
  Eigen::VectorXd decode(const Eigen::VectorXd& y) const;

  // Row-per-sample batched forward passes.
  Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd decode_batch(const Eigen::MatrixXd& y) const;
};

struct SdneGradients {
  std::vector<Eigen::MatrixXd> enc_w, dec_w;
  std::vector<Eigen::VectorXd> enc_b, dec_b;

  static SdneGradients zeros_like(const SdneModel& model);
  // False if any entry is not finite; names the offending parameter.
  bool finite(std::string* which) const;
};

// Edge term over ordered vertex pairs: sum of s_rq * |y_r - y_q|^2. Each
// undirected edge therefore contributes twice.
double loss_first_order(const SimilarityGraph& graph, const Eigen::MatrixXd& embeddings);

// Weighted reconstruction error: sum over rows of |(s_hat - s) . pen|^2
// where pen is 1 on zero entries of s and beta elsewhere.
double loss_second_order(const Eigen::MatrixXd& s, const Eigen::MatrixXd& s_hat, double beta);

// Edge term plus alpha times reconstruction error over the whole graph.
double loss_total(const SimilarityGraph& graph, const SdneModel& model, double alpha, double beta);

// Objective restricted to a batch of vertices (with multiplicity): edge
// terms for ordered pairs whose first endpoint is in the batch, plus the
// batch rows' reconstruction error. This is exactly what backward
// differentiates, which makes finite-difference checks well posed.
double batch_loss(const SimilarityGraph& graph, const SdneModel& model, std::span<const int> batch,
                  double alpha, double beta);

struct SdneBackwardResult {
  SdneGradients grads;
  double loss = 0.0;  // batch_loss value at the current parameters
};

// Analytic gradients of batch_loss for every parameter. Edge terms push
// gradient through the encoder paths of both endpoints.
SdneBackwardResult backward(const SimilarityGraph& graph, const SdneModel& model,
                            std::span<const int> batch, double alpha, double beta);

struct SdneTrainResult {
  SdneModel model;
  Eigen::MatrixXd embeddings;        // one row per vertex
  std::vector<double> epoch_losses;  // running objective per epoch
};

using SdneEpochCallback = std::function<void(int epoch, double loss)>;

// Minibatch SGD over shuffled vertex batches. Deterministic for a fixed
// config. Throws TrainingError when gradients or the loss leave the finite
// range.
SdneTrainResult train_sdne(const SimilarityGraph& graph, const SdneConfig& config,
                           const SdneEpochCallback& on_epoch = {});

// Checkpoint round trip, kind "sdne-model".
Checkpoint to_checkpoint(const SdneModel& model, const std::string& config_hash,
                         std::uint64_t seed);
SdneModel sdne_model_from_checkpoint(const Checkpoint& ckpt);

// Embedding table: artifact header, then one tab-separated line per
// repository (id first, then the coordinates in shortest round-trip form).
void save_embeddings_tsv(const Eigen::MatrixXd& embeddings, const Corpus& corpus,
                         const std::filesystem::path& path, const std::string& config_hash);

// Reads a table written by save_embeddings_tsv. Requires exactly one row
// per corpus repository and a matching config hash.
Eigen::MatrixXd load_embeddings_tsv(const std::filesystem::path& path, const Corpus& corpus,
                                    const std::string& expected_config_hash);

}  // namespace reporec
