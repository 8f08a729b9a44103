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

#include <cstdint>

namespace rabiest {

/// Counter-based SplitMix64 stream.
///
/// Draw i of a stream seeded with s is mix64(s + (i + 1) * 0x9e3779b97f4a7c15),
/// where mix64 is the SplitMix64 finalizer. Only integer arithmetic is used to
/// produce raw words, so sequences are identical on every platform. Floating
/// point draws take the top 53 bits. A stream is not thread safe; give every
/// task its own stream via split().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) noexcept : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;

  /// Standard normal via Box-Muller (one uniform pair per draw, no caching).
  double normal() noexcept;

  /// Independent child stream; the parent is not advanced.
  [[nodiscard]] RngStream split(std::uint64_t stream_id) const noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace rabiest
