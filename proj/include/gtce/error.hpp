// Copyright 2026 The GTCE Authors
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

#ifndef GTCE_ERROR_HPP_
#define GTCE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gtce {

/// Base error type for the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad inputs: malformed files, dimension mismatches, invalid graphs,
/// out-of-range arguments. CLI maps this to exit code 2.
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/// Numerical failures: zero-probability graphs, divergence, enumeration
/// caps exceeded. CLI maps this to exit code 3.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace gtce

#endif  // GTCE_ERROR_HPP_
