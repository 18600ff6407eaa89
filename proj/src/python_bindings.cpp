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
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "reporec/config.hpp"
#include "reporec/corpus.hpp"
#include "reporec/errors.hpp"
#include "reporec/eval.hpp"
#include "reporec/graph.hpp"
#include "reporec/gru.hpp"
#include "reporec/pipeline.hpp"
#include "reporec/sdne.hpp"
#include "reporec/text.hpp"

namespace py = pybind11;
using namespace reporec;

namespace {

Corpus load_corpus_dir(const std::filesystem::path& dir) {
  TextNormalizer normalizer;
  return load_corpus(CorpusPaths::in_dir(dir), normalizer);
}

SimilarityGraph build_graph_py(const Corpus& corpus, double epsilon) {
  TextNormalizer normalizer;
  auto vocab = TopicVocabulary::build(corpus);
  auto vectors = build_topic_vectors(corpus, vocab, normalizer);
  return build_graph(vectors.vectors, epsilon);
}

Eigen::MatrixXd train_sdne_py(const SimilarityGraph& graph, const std::vector<int>& hidden,
                              int dim, double alpha, double beta, double learning_rate,
                              int epochs, int batch_size, std::uint64_t seed) {
  SdneConfig config;
  config.layer_sizes.push_back(graph.vertex_count);
  config.layer_sizes.insert(config.layer_sizes.end(), hidden.begin(), hidden.end());
  config.layer_sizes.push_back(dim);
  config.alpha = alpha;
  config.beta = beta;
  config.learning_rate = learning_rate;
  config.epochs = epochs;
  config.batch_size = batch_size;
  config.seed = seed;
  return train_sdne(graph, config).embeddings;
}

template <typename Fn>
std::string run_logged(Fn fn) {
  std::ostringstream log;
  fn(log);
  return log.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sequential repository recommendation pipeline";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::class_<Corpus>(m, "Corpus")
      .def_property_readonly("user_count", [](const Corpus& c) { return c.users.size(); })
      .def_property_readonly("repo_count", [](const Corpus& c) { return c.repos.size(); })
      .def_property_readonly("interaction_count", &Corpus::interaction_count)
      .def_property_readonly("sparsity", &Corpus::sparsity)
      .def("repo_ids",
           [](const Corpus& c) {
             std::vector<std::string> out;
             for (const auto& r : c.repos) out.push_back(r.id);
             return out;
           })
      .def("user_ids",
           [](const Corpus& c) {
             std::vector<std::string> out;
             for (const auto& u : c.users) out.push_back(u.id);
             return out;
           })
      .def("repo_index", [](const Corpus& c, const std::string& id) { return c.repo_index(id); })
      .def("user_index", [](const Corpus& c, const std::string& id) { return c.user_index(id); })
      .def("interactions", [](const Corpus& c, const std::string& user_id) {
        int u = c.user_index(user_id);
        if (u < 0) throw ValidationError("unknown user '" + user_id + "'");
        std::vector<std::pair<std::string, std::int64_t>> out;
        for (const auto& it : c.users[static_cast<std::size_t>(u)].interactions) {
          out.emplace_back(c.repos[static_cast<std::size_t>(it.repo)].id, it.timestamp);
        }
        return out;
      });

  py::class_<SimilarityGraph>(m, "Graph")
      .def_property_readonly("vertex_count",
                             [](const SimilarityGraph& g) { return g.vertex_count; })
      .def_property_readonly("edge_count", &SimilarityGraph::edge_count)
      .def_property_readonly("epsilon", [](const SimilarityGraph& g) { return g.epsilon; })
      .def("weight", &SimilarityGraph::weight, py::arg("p"), py::arg("q"))
      .def("density", [](const SimilarityGraph& g) { return graph_stats(g).density; })
      .def("isolated", [](const SimilarityGraph& g) { return graph_stats(g).isolated; });

  py::class_<RunConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("in_dir", &RunConfig::in_dir)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("min_user_repos", &RunConfig::min_user_repos)
      .def_readwrite("min_repo_users", &RunConfig::min_repo_users)
      .def_readwrite("epsilon", &RunConfig::epsilon)
      .def_readwrite("embedding_dim", &RunConfig::embedding_dim)
      .def_readwrite("sdne_hidden", &RunConfig::sdne_hidden)
      .def_readwrite("sdne_epochs", &RunConfig::sdne_epochs)
      .def_readwrite("user_dim", &RunConfig::user_dim)
      .def_readwrite("window", &RunConfig::window)
      .def_readwrite("window_mode", &RunConfig::window_mode)
      .def_readwrite("negatives", &RunConfig::negatives)
      .def_readwrite("max_epochs", &RunConfig::max_epochs)
      .def_readwrite("top_n", &RunConfig::top_n)
      .def_readwrite("sparsity_level", &RunConfig::sparsity_level)
      .def_static("load", &RunConfig::load, py::arg("path"))
      .def("override", &RunConfig::apply_override, py::arg("key"), py::arg("value"))
      .def("validate", &RunConfig::validate)
      .def("hash", &RunConfig::hash)
      .def("canonical", &RunConfig::canonical);

  m.def("normalize", [](const std::string& text) { return TextNormalizer().normalize(text); },
        py::arg("text"));
  m.def("normalize_topic",
        [](const std::string& topic) { return TextNormalizer().normalize_topic(topic); },
        py::arg("topic"));
  m.def("cosine",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return cosine_similarity(std::span<const double>(a), std::span<const double>(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("hit_rate", &hit_rate, py::arg("rank"), py::arg("n"));
  m.def("reciprocal_rank", &reciprocal_rank, py::arg("rank"), py::arg("n"));
  m.def("ndcg", &ndcg, py::arg("rank"), py::arg("n"));
  m.def("minmax_scale",
        [](const std::vector<double>& v) { return minmax_scale(std::span<const double>(v)); },
        py::arg("values"));
  m.def("softmax", &softmax, py::arg("logits"));

  m.def("load_corpus", &load_corpus_dir, py::arg("dir"));
  m.def("filter_corpus", &filter_corpus, py::arg("corpus"), py::arg("min_user_repos"),
        py::arg("min_repo_users"), py::arg("single_pass") = false);
  m.def("build_graph", &build_graph_py, py::arg("corpus"), py::arg("epsilon"));
  m.def("train_sdne", &train_sdne_py, py::arg("graph"), py::arg("hidden"), py::arg("dim"),
        py::arg("alpha") = 1.0, py::arg("beta") = 5.0, py::arg("learning_rate") = 0.01,
        py::arg("epochs") = 50, py::arg("batch_size") = 128, py::arg("seed") = 1);

  m.def("ingest", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_ingest(c, os); });
  });
  m.def("build_graph_cmd", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_build_graph(c, os); });
  });
  m.def("train_sdne_cmd", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_train_sdne(c, os); });
  });
  m.def("train_rec_cmd", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_train_rec(c, os); });
  });
  m.def("evaluate_cmd", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_evaluate(c, os); });
  });
  m.def("recommend_cmd", [](const RunConfig& c, const std::string& user, int n) {
    return run_logged([&](std::ostream& os) { cmd_recommend(c, user, n, os); });
  }, py::arg("config"), py::arg("user"), py::arg("top_n") = 10);
  m.def("sparsify_cmd", [](const RunConfig& c) {
    return run_logged([&](std::ostream& os) { cmd_sparsify(c, os); });
  });
}
