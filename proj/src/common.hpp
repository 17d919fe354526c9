// Copyright 2026 The unisum Authors.
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

#ifndef UNISUM_COMMON_HPP_
#define UNISUM_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace unisum {

// Error taxonomy. The C API and CLI map each kind onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (corpus files, checkpoints, ids).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or off-simplex distributions.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Incompatible tensor shapes at graph construction time.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Emits a warning line on stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);
bool warnings_enabled();

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fingerprint(std::string_view bytes);

}  // namespace unisum

#endif  // UNISUM_COMMON_HPP_
