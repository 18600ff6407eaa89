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
#include "reporec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "reporec/artifact.hpp"
#include "reporec/errors.hpp"
#include "reporec/parallel.hpp"
#include "reporec/strings.hpp"

namespace reporec {

bool TopicVector::bit(int k) const {
  return std::binary_search(on_bits.begin(), on_bits.end(), static_cast<std::int32_t>(k));
}

std::vector<double> TopicVector::dense() const {
  std::vector<double> v(dim, 0.0);
  for (auto k : on_bits) v[k] = 1.0;
  return v;
}

TopicVectorSet build_topic_vectors(const Corpus& corpus, const TopicVocabulary& vocab,
                                   const TextNormalizer& normalizer) {
  TopicVectorSet set;
  set.vectors.resize(corpus.repos.size());
  parallel_chunks(corpus.repos.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      TopicVector tv;
      tv.repo = static_cast<int>(i);
      tv.dim = static_cast<int>(vocab.size());
      for (const auto& topic : complete_topics(corpus.repos[i], vocab, normalizer)) {
        int k = vocab.find(topic);
        if (k >= 0) tv.on_bits.push_back(k);
      }
      std::sort(tv.on_bits.begin(), tv.on_bits.end());
      set.vectors[i] = std::move(tv);
    }
  });
  for (const auto& tv : set.vectors) {
    if (tv.on_bits.empty()) ++set.zero_count;
  }
  return set;
}

double cosine_similarity(const TopicVector& a, const TopicVector& b) {
  if (a.on_bits.empty() || b.on_bits.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.on_bits.begin();
  auto ib = b.on_bits.begin();
  while (ia != a.on_bits.end() && ib != b.on_bits.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) /
         (std::sqrt(static_cast<double>(a.on_bits.size())) *
          std::sqrt(static_cast<double>(b.on_bits.size())));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double apply_threshold(double s, int p, int q, double epsilon) {
  if (p == q) return 0.0;
  return s >= epsilon ? s : 0.0;
}

std::size_t SimilarityGraph::edge_count() const {
  std::size_t stored = 0;
  for (const auto& row : rows) stored += row.size();
  return stored / 2;
}

double SimilarityGraph::weight(int p, int q) const {
  const auto& row = rows[p];
  auto it = std::lower_bound(row.begin(), row.end(), q,
                             [](const auto& e, int key) { return e.first < key; });
  if (it != row.end() && it->first == q) return it->second;
  return 0.0;
}

Eigen::VectorXd SimilarityGraph::dense_row(int r) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(vertex_count);
  for (const auto& [q, w] : rows[r]) v[q] = w;
  return v;
}

SimilarityGraph build_graph(const std::vector<TopicVector>& vectors, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("edge keeping threshold must lie in (0, 1)");
  }
  SimilarityGraph graph;
  graph.vertex_count = static_cast<int>(vectors.size());
  graph.epsilon = epsilon;
  graph.rows.resize(vectors.size());
  parallel_chunks(vectors.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      auto& row = graph.rows[p];
      for (std::size_t q = 0; q < vectors.size(); ++q) {
        if (p == q) continue;
        double s = apply_threshold(cosine_similarity(vectors[p], vectors[q]),
                                   static_cast<int>(p), static_cast<int>(q), epsilon);
        if (s > 0.0) row.emplace_back(static_cast<std::int32_t>(q), s);
      }
    }
  });
  return graph;
}

GraphStats graph_stats(const SimilarityGraph& graph) {
  GraphStats stats;
  stats.vertices = graph.vertex_count;
  stats.edges = graph.edge_count();
  for (const auto& row : graph.rows) {
    if (row.empty()) ++stats.isolated;
  }
  if (graph.vertex_count >= 2) {
    double pairs = 0.5 * static_cast<double>(graph.vertex_count) *
                   static_cast<double>(graph.vertex_count - 1);
    stats.density = static_cast<double>(stats.edges) / pairs;
  }
  return stats;
}

void save_graph_tsv(const SimilarityGraph& graph, const Corpus& corpus,
                    const std::filesystem::path& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_artifact_header(out, "graph", config_hash);
  for (int p = 0; p < graph.vertex_count; ++p) {
    for (const auto& [q, w] : graph.rows[p]) {
      if (q <= p) continue;
      out << corpus.repos[p].id << '\t' << corpus.repos[q].id << '\t' << format_fixed(w, 6)
          << '\n';
    }
  }
}

SimilarityGraph load_graph_tsv(const std::filesystem::path& path, const Corpus& corpus,
                               const std::string& expected_config_hash) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  auto hash = read_artifact_header(in, "graph", path.string());
  check_artifact_hash(hash, expected_config_hash, path.string());

  SimilarityGraph graph;
  graph.vertex_count = static_cast<int>(corpus.repos.size());
  graph.rows.resize(corpus.repos.size());
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(path.string(), lineno, "expected 3 columns");
    int p = corpus.repo_index(fields[0]);
    int q = corpus.repo_index(fields[1]);
    if (p < 0 || q < 0) {
      throw ParseError(path.string(), lineno, "edge references a repository not in the corpus");
    }
    double w = parse_double(fields[2], "edge weight");
    graph.rows[p].emplace_back(q, w);
    graph.rows[q].emplace_back(p, w);
  }
  for (auto& row : graph.rows) {
    std::sort(row.begin(), row.end());
  }
  // epsilon is not stored in the edge list; recover the tightest bound.
  graph.epsilon = 1.0;
  for (const auto& row : graph.rows) {
    for (const auto& [q, w] : row) graph.epsilon = std::min(graph.epsilon, w);
  }
  return graph;
}

}  // namespace reporec
