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

#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "reporec/errors.hpp"
#include "reporec/strings.hpp"

namespace reporec {

// Every text artifact produced by the pipeline starts with
//   # reporec <kind> config=<hash>
// so later stages can refuse inputs built from a different configuration.

inline void write_artifact_header(std::ostream& out, std::string_view kind,
                                  std::string_view config_hash) {
  out << "# reporec " << kind << " config=" << config_hash << "\n";
}

// Reads and validates the header line; returns the embedded config hash.
inline std::string read_artifact_header(std::istream& in, std::string_view kind,
                                        const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path + ": empty artifact, missing header");
  }
  auto fields = split_fields(line);
  const std::string prefix = "config=";
  if (fields.size() != 4 || fields[0] != "#" || fields[1] != "reporec" || fields[2] != kind ||
      fields[3].substr(0, prefix.size()) != prefix) {
    throw ValidationError(path + ": not a reporec " + std::string(kind) + " artifact");
  }
  return std::string(fields[3].substr(prefix.size()));
}

inline void check_artifact_hash(const std::string& found, std::string_view expected,
                                const std::string& path) {
  if (found != expected) {
    throw ValidationError(path + ": config hash mismatch (artifact " + found + ", current " +
                          std::string(expected) + "); rebuild upstream stages");
  }
}

}  // namespace reporec
