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
#include "reporec/sdne.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "reporec/artifact.hpp"
#include "reporec/errors.hpp"
#include "reporec/strings.hpp"

namespace reporec {
namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
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

// Everything the batch objective touches: encoder activations for the batch
// vertices and their neighbors, decoder activations for the batch rows, and
// the two loss components.
struct BatchForward {
  std::vector<int> verts;    // distinct vertices, batch first then neighbors
  std::vector<int> row_of;   // vertex -> row in the encoder matrices, or -1
  std::vector<Eigen::MatrixXd> enc_a;  // enc_a[0] = adjacency rows
  std::vector<Eigen::MatrixXd> dec_a;  // dec_a[0] = batch embeddings
  Eigen::MatrixXd x_batch;             // adjacency rows of the batch
  Eigen::MatrixXd pen;                 // reconstruction penalty, batch rows
  double loss1 = 0.0;
  double loss2 = 0.0;
};

BatchForward run_batch_forward(const SimilarityGraph& graph, const SdneModel& model,
                               std::span<const int> batch, double beta) {
  const int n = graph.vertex_count;
  BatchForward fw;
  fw.row_of.assign(n, -1);
  auto touch = [&](int v) {
    if (fw.row_of[v] < 0) {
      fw.row_of[v] = static_cast<int>(fw.verts.size());
      fw.verts.push_back(v);
    }
  };
  for (int r : batch) {
    touch(r);
    for (const auto& [q, w] : graph.rows[r]) touch(q);
  }

  const auto dn = static_cast<Eigen::Index>(fw.verts.size());
  Eigen::MatrixXd x_d = Eigen::MatrixXd::Zero(dn, n);
  for (Eigen::Index i = 0; i < dn; ++i) {
    for (const auto& [q, w] : graph.rows[fw.verts[i]]) x_d(i, q) = w;
  }

  fw.enc_a.resize(model.depth() + 1);
  fw.enc_a[0] = std::move(x_d);
  for (int k = 0; k < model.depth(); ++k) {
    fw.enc_a[k + 1] = sigmoid(
        ((fw.enc_a[k] * model.enc_w[k].transpose()).rowwise() + model.enc_b[k].transpose())
            .eval());
  }

  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd y_b(b, model.embedding_dim());
  fw.x_batch.resize(b, n);
  for (Eigen::Index j = 0; j < b; ++j) {
    int row = fw.row_of[batch[j]];
    y_b.row(j) = fw.enc_a.back().row(row);
    fw.x_batch.row(j) = fw.enc_a[0].row(row);
  }

  fw.dec_a.resize(model.depth() + 1);
  fw.dec_a[0] = std::move(y_b);
  for (int k = 0; k < model.depth(); ++k) {
    fw.dec_a[k + 1] = sigmoid(
        ((fw.dec_a[k] * model.dec_w[k].transpose()).rowwise() + model.dec_b[k].transpose())
            .eval());
  }

  fw.pen = fw.x_batch.unaryExpr([beta](double v) { return v == 0.0 ? 1.0 : beta; });
  fw.loss2 = ((fw.dec_a.back() - fw.x_batch).cwiseProduct(fw.pen)).squaredNorm();

  const auto& y_all = fw.enc_a.back();
  for (Eigen::Index j = 0; j < b; ++j) {
    int r = batch[j];
    int rr = fw.row_of[r];
    for (const auto& [q, w] : graph.rows[r]) {
      fw.loss1 += w * (y_all.row(rr) - y_all.row(fw.row_of[q])).squaredNorm();
    }
  }
  return fw;
}

}  // namespace

void SdneConfig::validate() const {
  if (layer_sizes.size() < 2) throw ValidationError("sdne needs at least input and output layers");
  for (int d : layer_sizes) {
    if (d < 1) throw ValidationError("sdne layer sizes must be positive");
  }
  if (!(alpha > 0.0)) throw ValidationError("sdne alpha must be positive");
  if (!(beta > 1.0)) throw ValidationError("sdne beta must exceed 1");
  if (!(learning_rate > 0.0)) throw ValidationError("sdne learning rate must be positive");
  if (epochs < 0) throw ValidationError("sdne epochs must be non-negative");
  if (batch_size < 1) throw ValidationError("sdne batch size must be at least 1");
  if (weight_decay < 0.0) throw ValidationError("sdne weight decay must be non-negative");
}

SdneModel SdneModel::init(const std::vector<int>& layer_sizes, Rng& rng) {
  SdneModel m;
  m.dims = layer_sizes;
  const int k = m.depth();
  for (int i = 0; i < k; ++i) {
    m.enc_w.push_back(glorot(m.dims[i + 1], m.dims[i], rng));
    m.enc_b.push_back(Eigen::VectorXd::Zero(m.dims[i + 1]));
  }
  for (int i = 0; i < k; ++i) {
    m.dec_w.push_back(glorot(m.dims[k - i - 1], m.dims[k - i], rng));
    m.dec_b.push_back(Eigen::VectorXd::Zero(m.dims[k - i - 1]));
  }
  return m;
}

std::size_t SdneModel::parameter_count() const {
  std::size_t count = 0;
  for (const auto& w : enc_w) count += static_cast<std::size_t>(w.size());
  for (const auto& b : enc_b) count += static_cast<std::size_t>(b.size());
  for (const auto& w : dec_w) count += static_cast<std::size_t>(w.size());
  for (const auto& b : dec_b) count += static_cast<std::size_t>(b.size());
  return count;
}

std::vector<Eigen::VectorXd> SdneModel::encode_layers(const Eigen::VectorXd& s) const {
  if (s.size() != input_dim()) {
    throw ValidationError("encoder input has length " + std::to_string(s.size()) +
                          ", expected " + std::to_string(input_dim()));
  }
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd a = s;
  for (int k = 0; k < depth(); ++k) {
    a = sigmoid((enc_w[k] * a + enc_b[k]).eval());
    out.push_back(a);
  }
  return out;
}

Eigen::VectorXd SdneModel::encode(const Eigen::VectorXd& s) const {
  return encode_layers(s).back();
}

Eigen::VectorXd SdneModel::decode(const Eigen::VectorXd& y) const {
  if (y.size() != embedding_dim()) {
    throw ValidationError("decoder input has length " + std::to_string(y.size()) +
                          ", expected " + std::to_string(embedding_dim()));
  }
  Eigen::VectorXd a = y;
  for (int k = 0; k < depth(); ++k) {
    a = sigmoid((dec_w[k] * a + dec_b[k]).eval());
  }
  return a;
}

Eigen::MatrixXd SdneModel::encode_batch(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw ValidationError("encoder batch has wrong width");
  Eigen::MatrixXd a = x;
  for (int k = 0; k < depth(); ++k) {
    a = sigmoid(((a * enc_w[k].transpose()).rowwise() + enc_b[k].transpose()).eval());
  }
  return a;
}

Eigen::MatrixXd SdneModel::decode_batch(const Eigen::MatrixXd& y) const {
  if (y.cols() != embedding_dim()) throw ValidationError("decoder batch has wrong width");
  Eigen::MatrixXd a = y;
  for (int k = 0; k < depth(); ++k) {
    a = sigmoid(((a * dec_w[k].transpose()).rowwise() + dec_b[k].transpose()).eval());
  }
  return a;
}

SdneGradients SdneGradients::zeros_like(const SdneModel& model) {
  SdneGradients g;
  for (const auto& w : model.enc_w) g.enc_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.enc_b) g.enc_b.push_back(Eigen::VectorXd::Zero(b.size()));
  for (const auto& w : model.dec_w) g.dec_w.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.dec_b) g.dec_b.push_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

bool SdneGradients::finite(std::string* which) const {
  auto bad = [&](const auto& m, const std::string& name) {
    if (!m.allFinite()) {
      if (which) *which = name;
      return true;
    }
    return false;
  };
  for (std::size_t k = 0; k < enc_w.size(); ++k) {
    if (bad(enc_w[k], "encoder W(" + std::to_string(k + 1) + ")")) return false;
    if (bad(enc_b[k], "encoder b(" + std::to_string(k + 1) + ")")) return false;
  }
  for (std::size_t k = 0; k < dec_w.size(); ++k) {
    if (bad(dec_w[k], "decoder W(" + std::to_string(k + 1) + ")")) return false;
    if (bad(dec_b[k], "decoder b(" + std::to_string(k + 1) + ")")) return false;
  }
  return true;
}

double loss_first_order(const SimilarityGraph& graph, const Eigen::MatrixXd& embeddings) {
  double loss = 0.0;
  for (int r = 0; r < graph.vertex_count; ++r) {
    for (const auto& [q, w] : graph.rows[r]) {
      loss += w * (embeddings.row(r) - embeddings.row(q)).squaredNorm();
    }
  }
  return loss;
}

double loss_second_order(const Eigen::MatrixXd& s, const Eigen::MatrixXd& s_hat, double beta) {
  if (s.rows() != s_hat.rows() || s.cols() != s_hat.cols()) {
    throw ValidationError("reconstruction shape does not match input shape");
  }
  Eigen::MatrixXd pen = s.unaryExpr([beta](double v) { return v == 0.0 ? 1.0 : beta; });
  return ((s_hat - s).cwiseProduct(pen)).squaredNorm();
}

double loss_total(const SimilarityGraph& graph, const SdneModel& model, double alpha,
                  double beta) {
  const int n = graph.vertex_count;
  Eigen::MatrixXd embeddings(n, model.embedding_dim());
  double loss2 = 0.0;
  const int block = 256;
  for (int start = 0; start < n; start += block) {
    int rows = std::min(block, n - start);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, n);
    for (int i = 0; i < rows; ++i) {
      for (const auto& [q, w] : graph.rows[start + i]) x(i, q) = w;
    }
    Eigen::MatrixXd y = model.encode_batch(x);
    loss2 += loss_second_order(x, model.decode_batch(y), beta);
    embeddings.middleRows(start, rows) = y;
  }
  return loss_first_order(graph, embeddings) + alpha * loss2;
}

double batch_loss(const SimilarityGraph& graph, const SdneModel& model, std::span<const int> batch,
                  double alpha, double beta) {
  if (batch.empty()) throw ValidationError("batch must be non-empty");
  auto fw = run_batch_forward(graph, model, batch, beta);
  return fw.loss1 + alpha * fw.loss2;
}

SdneBackwardResult backward(const SimilarityGraph& graph, const SdneModel& model,
                            std::span<const int> batch, double alpha, double beta) {
  if (batch.empty()) throw ValidationError("batch must be non-empty");
  const int k = model.depth();
  auto fw = run_batch_forward(graph, model, batch, beta);

  SdneBackwardResult res;
  res.grads = SdneGradients::zeros_like(model);
  res.loss = fw.loss1 + alpha * fw.loss2;

  // Reconstruction path, batch rows only.
  Eigen::MatrixXd g =
      2.0 * alpha *
      (fw.dec_a.back() - fw.x_batch).cwiseProduct(fw.pen).cwiseProduct(fw.pen);
  for (int j = k - 1; j >= 0; --j) {
    Eigen::MatrixXd dz =
        g.cwiseProduct(fw.dec_a[j + 1])
            .cwiseProduct((1.0 - fw.dec_a[j + 1].array()).matrix());
    res.grads.dec_w[j] += dz.transpose() * fw.dec_a[j];
    res.grads.dec_b[j] += dz.colwise().sum().transpose();
    g = dz * model.dec_w[j];
  }

  // g now holds the reconstruction gradient at the embedding layer, one row
  // per batch occurrence; fold into the distinct-vertex embedding gradient.
  Eigen::MatrixXd dy =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(fw.verts.size()), model.embedding_dim());
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(batch.size()); ++j) {
    dy.row(fw.row_of[batch[j]]) += g.row(j);
  }

  // Edge terms pull gradient into both endpoints of every pair.
  const auto& y_all = fw.enc_a.back();
  for (int r : batch) {
    int rr = fw.row_of[r];
    for (const auto& [q, w] : graph.rows[r]) {
      int qq = fw.row_of[q];
      Eigen::RowVectorXd diff = 2.0 * w * (y_all.row(rr) - y_all.row(qq));
      dy.row(rr) += diff;
      dy.row(qq) -= diff;
    }
  }

  for (int j = k - 1; j >= 0; --j) {
    Eigen::MatrixXd dz =
        dy.cwiseProduct(fw.enc_a[j + 1])
            .cwiseProduct((1.0 - fw.enc_a[j + 1].array()).matrix());
    res.grads.enc_w[j] += dz.transpose() * fw.enc_a[j];
    res.grads.enc_b[j] += dz.colwise().sum().transpose();
    dy = dz * model.enc_w[j];
  }
  return res;
}

SdneTrainResult train_sdne(const SimilarityGraph& graph, const SdneConfig& config,
                           const SdneEpochCallback& on_epoch) {
  config.validate();
  if (config.layer_sizes.front() != graph.vertex_count) {
    throw ValidationError("sdne input layer must match vertex count " +
                          std::to_string(graph.vertex_count));
  }

  Rng root(config.seed);
  Rng init_rng = root.split("init");
  Rng order_rng = root.split("order");

  SdneTrainResult out;
  out.model = SdneModel::init(config.layer_sizes, init_rng);

  std::vector<int> order(graph.vertex_count);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t len = std::min<std::size_t>(config.batch_size, order.size() - start);
      std::span<const int> batch(order.data() + start, len);
      auto res = backward(graph, out.model, batch, config.alpha, config.beta);
      std::string which;
      if (!res.grads.finite(&which)) {
        throw TrainingError("non-finite gradient in " + which + " at epoch " +
                            std::to_string(epoch));
      }
      epoch_loss += res.loss;
      const double lr = config.learning_rate;
      const double wd = 2.0 * config.weight_decay;
      for (int j = 0; j < out.model.depth(); ++j) {
        if (wd > 0.0) {
          res.grads.enc_w[j] += wd * out.model.enc_w[j];
          res.grads.enc_b[j] += wd * out.model.enc_b[j];
          res.grads.dec_w[j] += wd * out.model.dec_w[j];
          res.grads.dec_b[j] += wd * out.model.dec_b[j];
        }
        out.model.enc_w[j] -= lr * res.grads.enc_w[j];
        out.model.enc_b[j] -= lr * res.grads.enc_b[j];
        out.model.dec_w[j] -= lr * res.grads.dec_w[j];
        out.model.dec_b[j] -= lr * res.grads.dec_b[j];
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("training diverged: loss " + format_shortest(epoch_loss) +
                          " at epoch " + std::to_string(epoch) + " of " +
                          std::to_string(config.epochs) + " (learning rate " +
                          format_shortest(config.learning_rate) + ")");
    }
    out.epoch_losses.push_back(epoch_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss);
  }

  const int n = graph.vertex_count;
  out.embeddings.resize(n, out.model.embedding_dim());
  const int block = 256;
  for (int start = 0; start < n; start += block) {
    int rows = std::min(block, n - start);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, n);
    for (int i = 0; i < rows; ++i) {
      for (const auto& [q, w] : graph.rows[start + i]) x(i, q) = w;
    }
    out.embeddings.middleRows(start, rows) = out.model.encode_batch(x);
  }
  return out;
}

Checkpoint to_checkpoint(const SdneModel& model, const std::string& config_hash,
                         std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.kind = "sdne-model";
  ckpt.config_hash = config_hash;
  ckpt.seed = seed;
  ckpt.set_meta("layer_count", static_cast<std::int64_t>(model.dims.size()));
  for (std::size_t k = 0; k < model.dims.size(); ++k) {
    ckpt.set_meta("dim" + std::to_string(k), model.dims[k]);
  }
  for (int k = 0; k < model.depth(); ++k) {
    auto tag = std::to_string(k + 1);
    ckpt.add_matrix("enc_w" + tag, model.enc_w[k]);
    ckpt.add_matrix("enc_b" + tag, model.enc_b[k]);
    ckpt.add_matrix("dec_w" + tag, model.dec_w[k]);
    ckpt.add_matrix("dec_b" + tag, model.dec_b[k]);
  }
  return ckpt;
}

SdneModel sdne_model_from_checkpoint(const Checkpoint& ckpt) {
  SdneModel model;
  auto layer_count = ckpt.meta_value("layer_count");
  if (layer_count < 2) throw ValidationError("sdne checkpoint needs at least two layers");
  for (std::int64_t k = 0; k < layer_count; ++k) {
    model.dims.push_back(static_cast<int>(ckpt.meta_value("dim" + std::to_string(k))));
  }
  for (int k = 0; k < model.depth(); ++k) {
    auto tag = std::to_string(k + 1);
    model.enc_w.push_back(ckpt.matrix("enc_w" + tag));
    model.enc_b.push_back(ckpt.matrix("enc_b" + tag));
    model.dec_w.push_back(ckpt.matrix("dec_w" + tag));
    model.dec_b.push_back(ckpt.matrix("dec_b" + tag));
    if (model.enc_w[k].rows() != model.dims[k + 1] || model.enc_w[k].cols() != model.dims[k]) {
      throw ValidationError("sdne checkpoint: enc_w" + tag + " has the wrong shape");
    }
  }
  return model;
}

void save_embeddings_tsv(const Eigen::MatrixXd& embeddings, const Corpus& corpus,
                         const std::filesystem::path& path, const std::string& config_hash) {
  if (static_cast<std::size_t>(embeddings.rows()) != corpus.repos.size()) {
    throw ValidationError("embedding row count does not match the corpus");
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_artifact_header(out, "embeddings", config_hash);
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    out << corpus.repos[static_cast<std::size_t>(i)].id;
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      out << '\t' << format_shortest(embeddings(i, j));
    }
    out << '\n';
  }
  if (!out) throw ValidationError("failed writing " + path.string());
}

Eigen::MatrixXd load_embeddings_tsv(const std::filesystem::path& path, const Corpus& corpus,
                                    const std::string& expected_config_hash) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  auto found = read_artifact_header(in, "embeddings", path.string());
  if (!expected_config_hash.empty()) {
    check_artifact_hash(found, expected_config_hash, path.string());
  }
  Eigen::MatrixXd out;
  std::vector<bool> seen(corpus.repos.size(), false);
  std::string line;
  int line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() < 2) throw ParseError(path.string(), line_no, "expected id and values");
    int repo = corpus.repo_index(fields[0]);
    if (repo < 0) {
      throw ParseError(path.string(), line_no, "unknown repository '" + std::string(fields[0]) + "'");
    }
    if (seen[static_cast<std::size_t>(repo)]) {
      throw ParseError(path.string(), line_no, "duplicate repository '" + std::string(fields[0]) + "'");
    }
    seen[static_cast<std::size_t>(repo)] = true;
    auto dim = static_cast<Eigen::Index>(fields.size()) - 1;
    if (out.size() == 0) {
      out.resize(static_cast<Eigen::Index>(corpus.repos.size()), dim);
    } else if (dim != out.cols()) {
      throw ParseError(path.string(), line_no, "inconsistent embedding width");
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      out(repo, j) = parse_double(fields[static_cast<std::size_t>(j) + 1]);
    }
    ++rows;
  }
  if (rows != corpus.repos.size()) {
    throw ValidationError(path.string() + ": expected " + std::to_string(corpus.repos.size()) +
                          " embedding rows, found " + std::to_string(rows));
  }
  return out;
}

}  // namespace reporec
