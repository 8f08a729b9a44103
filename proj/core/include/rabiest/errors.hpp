// Copyright 2026 The rabiest Authors
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

namespace rabiest {

/// Input failed a precondition (non-Hermitian matrix, unnormalized state,
/// invalid POVM, malformed argument).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The request is mathematically singular: a singular evolution time, a
/// degenerate spectrum, or a rank-deficient Fisher matrix that would have to
/// be inverted.
class SingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gram-Schmidt met a vector that lies in the span of its predecessors.
class RankDeficiencyError : public std::domain_error {
 public:
  RankDeficiencyError(std::size_t index, const std::string& what)
      : std::domain_error(what), index_(index) {}

  /// Position of the offending vector in the input list.
  [[nodiscard]] std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace rabiest
