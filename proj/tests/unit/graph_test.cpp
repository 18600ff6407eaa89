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
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "helpers.hpp"
#include "reporec/errors.hpp"
#include "reporec/graph.hpp"
#include "reporec/rng.hpp"

using namespace reporec;
using namespace reporec::test;

namespace {

TopicVector bits(int repo, int dim, std::vector<std::int32_t> on) {
  TopicVector v;
  v.repo = repo;
  v.dim = dim;
  v.on_bits = std::move(on);
  return v;
}

std::vector<TopicVector> random_vectors(Rng& rng, int n, int dim) {
  std::vector<TopicVector> out;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int32_t> on;
    for (int k = 0; k < dim; ++k) {
      if (rng.uniform() < 0.4) on.push_back(k);
    }
    out.push_back(bits(i, dim, std::move(on)));
  }
  return out;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("binary cosine matches precomputed values") {
  // |common| / sqrt(|a| * |b|), checked independently.
  CHECK(cosine_similarity(bits(0, 8, {0, 1, 3}), bits(1, 8, {1, 3, 4})) ==
        doctest::Approx(0.6666666666666667).epsilon(1e-12));
  CHECK(cosine_similarity(bits(0, 4, {0, 1, 2, 3}), bits(1, 4, {0, 1, 2, 3})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(bits(0, 6, {0, 1}), bits(1, 6, {2, 3})) == 0.0);
  CHECK(cosine_similarity(bits(0, 6, {}), bits(1, 6, {1})) == 0.0);
  CHECK(cosine_similarity(bits(0, 9, {2, 4, 6, 8}), bits(1, 9, {0, 2, 4})) ==
        doctest::Approx(0.5773502691896258).epsilon(1e-12));
}

TEST_CASE("binary cosine agrees with the dense-vector cosine") {
  Rng rng(424242);
  for (int trial = 0; trial < 100; ++trial) {
    auto vs = random_vectors(rng, 2, uniform_int(rng, 1, 12));
    auto da = vs[0].dense();
    auto db = vs[1].dense();
    double sparse = cosine_similarity(vs[0], vs[1]);
    double dense = cosine_similarity(std::span<const double>(da), std::span<const double>(db));
    CHECK(sparse == doctest::Approx(dense).epsilon(1e-12));
  }
}

TEST_CASE("topic vector bit access and densification") {
  auto v = bits(3, 5, {1, 4});
  CHECK_FALSE(v.bit(0));
  CHECK(v.bit(1));
  CHECK_FALSE(v.bit(2));
  CHECK(v.bit(4));
  CHECK(v.dense() == std::vector<double>{0, 1, 0, 0, 1});
}

TEST_CASE("build_topic_vectors marks completed topics") {
  TextNormalizer norm;
  Corpus c = build_corpus({{"A", {"graphs"}, "", "", "C++"},
                           {"B", {}, "all about graphs", "", ""},
                           {"C", {}, "nothing relevant", "", ""}},
                          {{"u1", {{"A", 1}, {"B", 2}, {"C", 3}}}});
  auto vocab = TopicVocabulary::build(c);  // {c, graph}
  REQUIRE(vocab.size() == 2);
  auto set = build_topic_vectors(c, vocab, norm);
  REQUIRE(set.vectors.size() == 3);
  CHECK(set.vectors[0].on_bits == std::vector<std::int32_t>{0, 1});
  CHECK(set.vectors[1].on_bits == std::vector<std::int32_t>{1});
  CHECK(set.vectors[2].on_bits.empty());
  CHECK(set.zero_count == 1);
  for (const auto& v : set.vectors) CHECK(v.dim == 2);
}

TEST_CASE("apply_threshold keeps the boundary and zeroes the diagonal") {
  CHECK(apply_threshold(0.5, 0, 1, 0.3) == 0.5);
  CHECK(apply_threshold(0.3, 0, 1, 0.3) == 0.3);  // s == epsilon stays
  CHECK(apply_threshold(0.29999, 0, 1, 0.3) == 0.0);
  CHECK(apply_threshold(0.9, 2, 2, 0.3) == 0.0);  // diagonal
  CHECK(apply_threshold(0.0, 0, 1, 0.3) == 0.0);
}

TEST_CASE("build_graph equals the quadratic reference on random inputs") {
  Rng rng(7321);
  for (int trial = 0; trial < 50; ++trial) {
    int n = uniform_int(rng, 1, 8);
    int dim = uniform_int(rng, 1, 10);
    double epsilon = rng.uniform(0.05, 0.95);
    auto vs = random_vectors(rng, n, dim);
    auto g = build_graph(vs, epsilon);
    REQUIRE(g.vertex_count == n);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        double expected = apply_threshold(cosine_similarity(vs[p], vs[q]), p, q, epsilon);
        CHECK(g.weight(p, q) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("graph invariants hold on random inputs") {
  Rng rng(88);
  for (int trial = 0; trial < 100; ++trial) {
    int n = uniform_int(rng, 1, 12);
    auto vs = random_vectors(rng, n, uniform_int(rng, 1, 8));
    double epsilon = rng.uniform(0.05, 0.95);
    auto g = build_graph(vs, epsilon);
    for (int p = 0; p < n; ++p) {
      CHECK(g.weight(p, p) == 0.0);
      for (const auto& [q, w] : g.rows[p]) {
        CHECK(q != p);
        CHECK(w >= epsilon);
        CHECK(w <= 1.0 + 1e-12);
        CHECK(g.weight(q, p) == doctest::Approx(w).epsilon(1e-12));  // symmetry
      }
      // Neighbor lists are sorted and duplicate-free.
      for (std::size_t k = 1; k < g.rows[p].size(); ++k) {
        CHECK(g.rows[p][k - 1].first < g.rows[p][k].first);
      }
    }
  }
}

TEST_CASE("build_graph validates epsilon") {
  Rng rng(1);
  auto vs = random_vectors(rng, 3, 4);
  CHECK_THROWS_AS(build_graph(vs, 0.0), ValidationError);
  CHECK_THROWS_AS(build_graph(vs, 1.0), ValidationError);
  CHECK_THROWS_AS(build_graph(vs, -0.2), ValidationError);
  CHECK_NOTHROW(build_graph(vs, 0.5));
}

TEST_CASE("dense_row mirrors the sparse row") {
  Rng rng(515);
  auto vs = random_vectors(rng, 6, 7);
  auto g = build_graph(vs, 0.2);
  for (int p = 0; p < g.vertex_count; ++p) {
    auto row = g.dense_row(p);
    REQUIRE(row.size() == g.vertex_count);
    for (int q = 0; q < g.vertex_count; ++q) {
      CHECK(row[q] == doctest::Approx(g.weight(p, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("graph_stats counts edges, density, and isolated vertices") {
  auto g = clique_graph(2, 3, 0.8);  // two triangles
  auto stats = graph_stats(g);
  CHECK(stats.vertices == 6);
  CHECK(stats.edges == 6);
  CHECK(stats.density == doctest::Approx(6.0 / 15.0));
  CHECK(stats.isolated == 0);

  SimilarityGraph lonely;
  lonely.vertex_count = 3;
  lonely.epsilon = 0.5;
  lonely.rows.resize(3);
  auto ls = graph_stats(lonely);
  CHECK(ls.edges == 0);
  CHECK(ls.isolated == 3);
}

TEST_CASE("graph TSV round-trips through save and load") {
  TextNormalizer norm;
  Rng rng(31007);
  Corpus c = random_corpus(rng, 8, 6, 2, 6);
  auto vocab = TopicVocabulary::build(c);
  auto set = build_topic_vectors(c, vocab, norm);
  auto g = build_graph(set.vectors, 0.25);

  TempDir dir;
  auto path = dir / "graph.tsv";
  save_graph_tsv(g, c, path, "deadbeefdeadbeef");
  auto g2 = load_graph_tsv(path, c, "deadbeefdeadbeef");

  CHECK(g2.vertex_count == g.vertex_count);
  CHECK(g2.edge_count() == g.edge_count());
  for (int p = 0; p < g.vertex_count; ++p) {
    for (const auto& [q, w] : g.rows[p]) {
      // Weights persist with 6 decimals.
      CHECK(g2.weight(p, q) == doctest::Approx(w).epsilon(1e-5));
    }
  }
}

TEST_CASE("load_graph_tsv rejects a mismatched config hash") {
  TextNormalizer norm;
  Rng rng(31008);
  Corpus c = random_corpus(rng, 6, 5, 2, 5);
  auto set = build_topic_vectors(c, TopicVocabulary::build(c), norm);
  auto g = build_graph(set.vectors, 0.25);

  TempDir dir;
  auto path = dir / "graph.tsv";
  save_graph_tsv(g, c, path, "aaaaaaaaaaaaaaaa");
  CHECK_THROWS_AS(load_graph_tsv(path, c, "bbbbbbbbbbbbbbbb"), ValidationError);
  CHECK_NOTHROW(load_graph_tsv(path, c, "aaaaaaaaaaaaaaaa"));
}

TEST_CASE("load_graph_tsv rejects unknown repositories") {
  Corpus small = build_corpus({{"A"}, {"B"}}, {{"u1", {{"A", 1}, {"B", 2}}}});
  TempDir dir;
  auto path = dir / "graph.tsv";
  {
    std::ofstream out(path);
    out << "# reporec graph config=cafecafecafecafe\n";
    out << "A\tGHOST\t0.700000\n";
  }
  CHECK_THROWS_AS(load_graph_tsv(path, small, "cafecafecafecafe"), ValidationError);
}

}  // TEST_SUITE
