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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace reporec {

// Text checkpoint shared by both trainable models. Doubles are written in
// shortest round-trip form so a save/load cycle reproduces weights bit for bit.
struct Checkpoint {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::int64_t>> meta;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> matrices;

  void set_meta(const std::string& name, std::int64_t value);
  std::int64_t meta_value(const std::string& name) const;
  void add_matrix(const std::string& name, Eigen::MatrixXd m);
  const Eigen::MatrixXd& matrix(const std::string& name) const;
  bool has_matrix(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);

// Reads and validates a checkpoint. An empty expected_config_hash skips the
// hash comparison.
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_kind,
                           const std::string& expected_config_hash);

}  // namespace reporec
