// Copyright 2026 The ddoa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDOA_ERRORS_HPP_
#define DDOA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ddoa {

// Shape/axis mismatches between tensors, layers or signals.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Architecture that cannot produce a feature map (width underflow, bad
// layer counts, out-of-range builder arguments).
class InfeasibleArchitectureError : public std::invalid_argument {
 public:
  explicit InfeasibleArchitectureError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or mismatched data artifacts (files, digests, checksums) and
// runtime failures such as non-finite losses.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ddoa

#endif  // DDOA_ERRORS_HPP_
