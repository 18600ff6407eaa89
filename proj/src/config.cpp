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
#include "reporec/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "reporec/errors.hpp"
#include "reporec/rng.hpp"
#include "reporec/strings.hpp"

namespace reporec {

namespace {

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  if (trim(value).empty()) return out;
  for (const auto& part : split(value, ',')) {
    out.push_back(static_cast<int>(parse_int(trim(part))));
  }
  return out;
}

std::string join_int_list(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("expected a boolean (true/false), got '" + value + "'");
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path.string(), line_no, "expected key = value");
    }
    auto key = std::string(trim(text.substr(0, eq)));
    auto value = std::string(trim(text.substr(eq + 1)));
    try {
      config.apply_override(key, value);
    } catch (const ValidationError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return config;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
  if (key == "in_dir") {
    in_dir = value;
  } else if (key == "out_dir") {
    out_dir = value;
  } else if (key == "seed") {
    seed = parse_uint(value);
  } else if (key == "min_user_repos") {
    min_user_repos = static_cast<int>(parse_int(value));
  } else if (key == "min_repo_users") {
    min_repo_users = static_cast<int>(parse_int(value));
  } else if (key == "single_pass_filter") {
    single_pass_filter = parse_bool(value);
  } else if (key == "epsilon") {
    epsilon = parse_double(value);
  } else if (key == "embedding_dim") {
    embedding_dim = static_cast<int>(parse_int(value));
  } else if (key == "sdne_hidden") {
    sdne_hidden = parse_int_list(value);
  } else if (key == "sdne_alpha") {
    sdne_alpha = parse_double(value);
  } else if (key == "sdne_beta") {
    sdne_beta = parse_double(value);
  } else if (key == "sdne_learning_rate") {
    sdne_learning_rate = parse_double(value);
  } else if (key == "sdne_epochs") {
    sdne_epochs = static_cast<int>(parse_int(value));
  } else if (key == "sdne_batch_size") {
    sdne_batch_size = static_cast<int>(parse_int(value));
  } else if (key == "sdne_weight_decay") {
    sdne_weight_decay = parse_double(value);
  } else if (key == "user_dim") {
    user_dim = static_cast<int>(parse_int(value));
  } else if (key == "window") {
    window = static_cast<int>(parse_int(value));
  } else if (key == "window_mode") {
    window_mode = value;
  } else if (key == "negatives") {
    negatives = static_cast<int>(parse_int(value));
  } else if (key == "lambda") {
    lambda = parse_double(value);
  } else if (key == "learning_rate") {
    learning_rate = parse_double(value);
  } else if (key == "max_epochs") {
    max_epochs = static_cast<int>(parse_int(value));
  } else if (key == "batch_size") {
    batch_size = static_cast<int>(parse_int(value));
  } else if (key == "train_fraction") {
    train_fraction = parse_double(value);
  } else if (key == "valid_fraction") {
    valid_fraction = parse_double(value);
  } else if (key == "test_fraction") {
    test_fraction = parse_double(value);
  } else if (key == "skip_short_history") {
    skip_short_history = parse_bool(value);
  } else if (key == "exclude_seen") {
    exclude_seen = parse_bool(value);
  } else if (key == "macro_average") {
    macro_average = parse_bool(value);
  } else if (key == "top_n") {
    top_n = parse_int_list(value);
  } else if (key == "sparsity_level") {
    sparsity_level = value;
  } else if (key == "sparsity_budget") {
    sparsity_budget = parse_uint(value);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (in_dir.empty()) throw ValidationError("in_dir must not be empty");
  if (min_user_repos < 1) throw ValidationError("min_user_repos must be >= 1");
  if (min_repo_users < 1) throw ValidationError("min_repo_users must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie strictly between 0 and 1");
  }
  if (embedding_dim < 1) throw ValidationError("embedding_dim must be >= 1");
  for (int h : sdne_hidden) {
    if (h < 1) throw ValidationError("sdne_hidden sizes must be >= 1");
  }
  if (!(sdne_alpha > 0.0)) throw ValidationError("sdne_alpha must be > 0");
  if (!(sdne_beta > 1.0)) throw ValidationError("sdne_beta must be > 1");
  if (!(sdne_learning_rate > 0.0)) throw ValidationError("sdne_learning_rate must be > 0");
  if (sdne_epochs < 0) throw ValidationError("sdne_epochs must be >= 0");
  if (sdne_batch_size < 1) throw ValidationError("sdne_batch_size must be >= 1");
  if (sdne_weight_decay < 0.0) throw ValidationError("sdne_weight_decay must be >= 0");
  if (user_dim < 1) throw ValidationError("user_dim must be >= 1");
  if (window < 1) throw ValidationError("window must be >= 1");
  if (window_mode != "fixed" && window_mode != "full") {
    throw ValidationError("window_mode must be 'fixed' or 'full'");
  }
  if (negatives < 1) throw ValidationError("negatives must be >= 1");
  if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (max_epochs < 0) throw ValidationError("max_epochs must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  split_spec().validate();
  if (top_n.empty()) throw ValidationError("top_n must not be empty");
  for (int n : top_n) {
    if (n < 1) throw ValidationError("top_n entries must be >= 1");
  }
  parse_sparsity_level(sparsity_level);
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["in_dir"] = in_dir.string();
  kv["seed"] = std::to_string(seed);
  kv["min_user_repos"] = std::to_string(min_user_repos);
  kv["min_repo_users"] = std::to_string(min_repo_users);
  kv["single_pass_filter"] = single_pass_filter ? "true" : "false";
  kv["epsilon"] = format_shortest(epsilon);
  kv["embedding_dim"] = std::to_string(embedding_dim);
  kv["sdne_hidden"] = join_int_list(sdne_hidden);
  kv["sdne_alpha"] = format_shortest(sdne_alpha);
  kv["sdne_beta"] = format_shortest(sdne_beta);
  kv["sdne_learning_rate"] = format_shortest(sdne_learning_rate);
  kv["sdne_epochs"] = std::to_string(sdne_epochs);
  kv["sdne_batch_size"] = std::to_string(sdne_batch_size);
  kv["sdne_weight_decay"] = format_shortest(sdne_weight_decay);
  kv["user_dim"] = std::to_string(user_dim);
  kv["window"] = std::to_string(window);
  kv["window_mode"] = window_mode;
  kv["negatives"] = std::to_string(negatives);
  kv["lambda"] = format_shortest(lambda);
  kv["learning_rate"] = format_shortest(learning_rate);
  kv["max_epochs"] = std::to_string(max_epochs);
  kv["batch_size"] = std::to_string(batch_size);
  kv["train_fraction"] = format_shortest(train_fraction);
  kv["valid_fraction"] = format_shortest(valid_fraction);
  kv["test_fraction"] = format_shortest(test_fraction);
  kv["skip_short_history"] = skip_short_history ? "true" : "false";
  kv["exclude_seen"] = exclude_seen ? "true" : "false";
  kv["macro_average"] = macro_average ? "true" : "false";
  kv["top_n"] = join_int_list(top_n);
  kv["sparsity_level"] = sparsity_level;
  kv["sparsity_budget"] = std::to_string(sparsity_budget);

  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical())));
  return std::string(buf);
}

SdneConfig RunConfig::sdne_config(int vertex_count, std::uint64_t stage_seed) const {
  SdneConfig config;
  config.layer_sizes.clear();
  config.layer_sizes.push_back(vertex_count);
  config.layer_sizes.insert(config.layer_sizes.end(), sdne_hidden.begin(), sdne_hidden.end());
  config.layer_sizes.push_back(embedding_dim);
  config.alpha = sdne_alpha;
  config.beta = sdne_beta;
  config.learning_rate = sdne_learning_rate;
  config.epochs = sdne_epochs;
  config.batch_size = sdne_batch_size;
  config.weight_decay = sdne_weight_decay;
  config.seed = stage_seed;
  return config;
}

GruConfig RunConfig::gru_config(std::uint64_t stage_seed) const {
  GruConfig config;
  config.user_dim = user_dim;
  config.window = window;
  config.negatives = negatives;
  config.lambda = lambda;
  config.learning_rate = learning_rate;
  config.max_epochs = max_epochs;
  config.batch_size = batch_size;
  config.seed = stage_seed;
  return config;
}

SplitSpec RunConfig::split_spec() const {
  SplitSpec spec;
  spec.train_fraction = train_fraction;
  spec.valid_fraction = valid_fraction;
  spec.test_fraction = test_fraction;
  return spec;
}

SparsitySpec RunConfig::sparsity_spec(std::uint64_t stage_seed) const {
  SparsitySpec spec;
  spec.level = parse_sparsity_level(sparsity_level);
  spec.budget = sparsity_budget;
  spec.seed = stage_seed;
  return spec;
}

}  // namespace reporec
