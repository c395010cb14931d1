// Copyright 2026 The decadam authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstdint>
#include <vector>

#include "decadam/types.hpp"

namespace decadam {

// One master seed splits into independent per-purpose, per-worker streams.
// Each stream is a keyed counter generator (splitmix64), so adding workers or
// purposes never perturbs existing streams.

enum class StreamPurpose : std::uint64_t {
  gradient_noise = 1,
  problem_gen = 2,
  compressor = 3,
  verification = 4,
  init = 5,
};

/// splitmix64 finalizer; the core bijective mixing function.
std::uint64_t mix64(std::uint64_t z);

/// Derives a stream key from (seed, purpose, a, b). Pure function.
std::uint64_t stream_key(std::uint64_t seed, StreamPurpose purpose,
                         std::uint64_t a = 0, std::uint64_t b = 0);

/// Counter-based generator: output_i = mix64(key + i * golden_gamma).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  CounterRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t a = 0,
             std::uint64_t b = 0)
      : CounterRng(stream_key(seed, purpose, a, b)) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in (0, 1]; never zero (safe for log()).
  double uniform01_open_low();

  /// Uniform integer in [0, n); n >= 1. Rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Student-t with 3 degrees of freedom, rescaled to unit variance.
  double student_t3_unit();

  Vec normal_vec(int dim);

  /// k distinct indices out of [0, d), ascending order.
  std::vector<int> sample_without_replacement(int d, int k);

 private:
  std::uint64_t state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace decadam
