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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "reporec/corpus.hpp"

namespace reporec {

// Binary indicator over the topic vocabulary for one repository, stored as
// the sorted positions of set bits.
struct TopicVector {
  int repo = -1;
  int dim = 0;
  std::vector<std::int32_t> on_bits;  // sorted ascending

  bool bit(int k) const;
  std::vector<double> dense() const;
};

struct TopicVectorSet {
  std::vector<TopicVector> vectors;  // index-aligned with Corpus::repos
  int zero_count = 0;                // repositories left with no topics at all
};

// One vector per repository, bit k set iff vocabulary topic k is in the
// repository's completed topic set. All-zero vectors are counted and kept;
// they become isolated vertices.
TopicVectorSet build_topic_vectors(const Corpus& corpus, const TopicVocabulary& vocab,
                                   const TextNormalizer& normalizer);

// Cosine similarity of two binary topic vectors; 0 if either is all-zero.
double cosine_similarity(const TopicVector& a, const TopicVector& b);

// Generic real-valued cosine, used by the binary version's tests.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Edge-keeping rule: 0 on the diagonal, s when s >= epsilon, else 0.
double apply_threshold(double s, int p, int q, double epsilon);

// Symmetric thresholded similarity matrix in sparse row form. Immutable and
// shareable across threads once built.
struct SimilarityGraph {
  int vertex_count = 0;
  double epsilon = 0.0;
  // Per-vertex sorted (neighbor, weight) pairs; both directions stored.
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows;

  std::size_t edge_count() const;  // undirected
  double weight(int p, int q) const;
  Eigen::VectorXd dense_row(int r) const;
};

// All-pairs cosine over the topic vectors with the threshold applied.
// Rows are computed in parallel over disjoint ranges; the result is
// independent of the thread count. Throws ValidationError unless
// 0 < epsilon < 1.
SimilarityGraph build_graph(const std::vector<TopicVector>& vectors, double epsilon);

struct GraphStats {
  int vertices = 0;
  std::size_t edges = 0;
  double density = 0.0;  // edges / (n choose 2)
  int isolated = 0;
};

GraphStats graph_stats(const SimilarityGraph& graph);

// Edge-list export: one undirected edge per line, p < q by index, weights
// with 6 decimal places. First line is an artifact header carrying the
// config hash.
void save_graph_tsv(const SimilarityGraph& graph, const Corpus& corpus,
                    const std::filesystem::path& path, const std::string& config_hash);

// Reads a graph written by save_graph_tsv, mapping repository ids through
// the corpus ordering. Rejects a header whose config hash differs from
// expected_config_hash.
SimilarityGraph load_graph_tsv(const std::filesystem::path& path, const Corpus& corpus,
                               const std::string& expected_config_hash);

}  // namespace reporec
