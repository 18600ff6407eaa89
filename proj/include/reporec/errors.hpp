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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reporec {

// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid input data, arguments, or configuration. The CLI maps this to
// exit code 1; everything else exits 2.
struct ValidationError : Error {
  using Error::Error;
};

// Malformed input file; message carries file and line context.
struct ParseError : ValidationError {
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : ValidationError(file + ":" + std::to_string(line) + ": " + what) {}
  explicit ParseError(const std::string& what) : ValidationError(what) {}
};

// Numerical failure during training (divergence, non-finite gradients).
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace reporec
