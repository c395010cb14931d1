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

#include "decadam/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace decadam {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, StreamPurpose purpose,
                         std::uint64_t a, std::uint64_t b) {
  std::uint64_t key = mix64(seed + kGoldenGamma);
  key = mix64(key ^ (static_cast<std::uint64_t>(purpose) * kGoldenGamma));
  key = mix64(key ^ (a + 0xD1B54A32D192ED03ULL));
  key = mix64(key ^ (b + 0x8CB92BA72F3D8DD7ULL));
  return key;
}

std::uint64_t CounterRng::next_u64() {
  state_ += kGoldenGamma;
  return mix64(state_);
}

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform01_open_low() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t CounterRng::uniform_below(std::uint64_t n) {
  // Rejection from the top keeps the draw unbiased.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double CounterRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform01_open_low();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double CounterRng::student_t3_unit() {
  const double z = normal();
  double w = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double zi = normal();
    w += zi * zi;
  }
  // t_3 = z / sqrt(w/3) has variance 3; divide by sqrt(3) for unit variance.
  const double t = z / std::sqrt(std::max(w, 1e-300) / 3.0);
  return t / std::sqrt(3.0);
}

Vec CounterRng::normal_vec(int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal();
  return v;
}

std::vector<int> CounterRng::sample_without_replacement(int d, int k) {
  std::vector<int> pool(d);
  for (int i = 0; i < d; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(uniform_below(d - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace decadam
