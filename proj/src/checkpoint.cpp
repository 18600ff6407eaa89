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
#include "reporec/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "reporec/artifact.hpp"
#include "reporec/errors.hpp"
#include "reporec/strings.hpp"

namespace reporec {

void Checkpoint::set_meta(const std::string& name, std::int64_t value) {
  for (auto& [k, v] : meta) {
    if (k == name) {
      v = value;
      return;
    }
  }
  meta.emplace_back(name, value);
}

std::int64_t Checkpoint::meta_value(const std::string& name) const {
  for (const auto& [k, v] : meta) {
    if (k == name) return v;
  }
  throw ValidationError("checkpoint is missing metadata entry '" + name + "'");
}

void Checkpoint::add_matrix(const std::string& name, Eigen::MatrixXd m) {
  matrices.emplace_back(name, std::move(m));
}

const Eigen::MatrixXd& Checkpoint::matrix(const std::string& name) const {
  for (const auto& [k, m] : matrices) {
    if (k == name) return m;
  }
  throw ValidationError("checkpoint is missing matrix '" + name + "'");
}

bool Checkpoint::has_matrix(const std::string& name) const {
  return std::any_of(matrices.begin(), matrices.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_artifact_header(out, ckpt.kind, ckpt.config_hash);
  out << "seed " << ckpt.seed << '\n';
  for (const auto& [k, v] : ckpt.meta) {
    out << "meta " << k << ' ' << v << '\n';
  }
  for (const auto& [name, m] : ckpt.matrices) {
    out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j > 0) out << ' ';
        out << format_shortest(m(i, j));
      }
      out << '\n';
    }
  }
  if (!out) throw ValidationError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_kind,
                           const std::string& expected_config_hash) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());

  Checkpoint ckpt;
  ckpt.kind = expected_kind;
  ckpt.config_hash = read_artifact_header(in, expected_kind, path.string());
  if (!expected_config_hash.empty()) {
    check_artifact_hash(ckpt.config_hash, expected_config_hash, path.string());
  }

  std::string line;
  std::size_t lineno = 1;
  bool have_seed = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields[0] == "seed") {
      if (fields.size() != 2) throw ParseError(path.string(), lineno, "malformed seed line");
      ckpt.seed = parse_uint(fields[1], "seed");
      have_seed = true;
    } else if (fields[0] == "meta") {
      if (fields.size() != 3) throw ParseError(path.string(), lineno, "malformed meta line");
      ckpt.meta.emplace_back(std::string(fields[1]), parse_int(fields[2], "meta value"));
    } else if (fields[0] == "matrix") {
      if (fields.size() != 4) throw ParseError(path.string(), lineno, "malformed matrix line");
      // Copy the name out before getline below invalidates the views.
      std::string name(fields[1]);
      auto rows = parse_int(fields[2], "matrix rows");
      auto cols = parse_int(fields[3], "matrix cols");
      if (rows < 0 || cols < 0) {
        throw ParseError(path.string(), lineno, "matrix dimensions must be non-negative");
      }
      Eigen::MatrixXd m(rows, cols);
      for (std::int64_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) {
          throw ParseError(path.string(), lineno, "truncated matrix '" + name + "'");
        }
        ++lineno;
        auto values = split_fields(line);
        if (static_cast<std::int64_t>(values.size()) != cols) {
          throw ParseError(path.string(), lineno, "expected " + std::to_string(cols) +
                                                      " values in matrix row");
        }
        for (std::int64_t j = 0; j < cols; ++j) {
          m(i, j) = parse_double(values[j], "matrix value");
        }
      }
      ckpt.matrices.emplace_back(name, std::move(m));
    } else {
      throw ParseError(path.string(), lineno, "unrecognized record '" + std::string(fields[0]) +
                                                  "'");
    }
  }
  if (!have_seed) throw ValidationError(path.string() + ": checkpoint has no seed record");
  return ckpt;
}

}  // namespace reporec
