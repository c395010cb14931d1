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
#include <optional>
#include <string>

#include "decadam/rng.hpp"
#include "decadam/types.hpp"

namespace decadam {

// Contraction operators: every Q here guarantees
//   ||x - Q(x)||^2 <= (1 - delta) ||x||^2
// with delta in (0, 1], exactly for the deterministic kinds and in
// expectation for random_k.

enum class CompressorKind { identity, scaled_sign, top_k, random_k };

std::string to_string(CompressorKind kind);
CompressorKind compressor_kind_from_string(const std::string& s);

struct CompressorSpec {
  CompressorKind kind = CompressorKind::identity;
  int k = 0;  // selection size; top_k / random_k only

  /// Worst-case (top_k, scaled_sign) or in-expectation (random_k)
  /// contraction coefficient for vectors of dimension `dim`.
  double guaranteed_delta(int dim) const;

  bool deterministic() const { return kind != CompressorKind::random_k; }

  /// Throws ValidationError when k is out of range for `dim` or dim < 1.
  void validate(int dim) const;

  bool operator==(const CompressorSpec&) const = default;
};

struct CompressResult {
  Vec q;
  std::uint64_t payload_bits = 0;
};

/// Wire size of one compressed vector. Floats are accounted at 32 bits;
/// random_k ships a 32-bit shared seed instead of explicit indices.
std::uint64_t payload_bits(const CompressorSpec& spec, int dim);

/// Per-vector contraction coefficient of the rescaled sign operator,
/// ||x||_1^2 / (d ||x||_2^2); equals 1 when all magnitudes match.
double scaled_sign_delta(const Vec& x);

/// Applies Q. Deterministic given (spec, x, rng state); rng consumed only by
/// random_k. sign(0) is taken as +1.
CompressResult compress(const CompressorSpec& spec, const Vec& x,
                        CounterRng& rng);

struct ContractionReport {
  CompressorKind kind;
  int dim = 0;
  int trials = 0;
  double max_ratio = 0.0;       // worst observed ||x - Q(x)||^2 / ||x||^2
  double mean_ratio = 0.0;      // pooled over every sample/redraw
  double threshold = 0.0;       // 1 - guaranteed delta (+3 SE for random_k)
  double standard_error = 0.0;  // of the pooled mean (random_k only)
  int violations = 0;
  bool satisfied = false;
  std::optional<Vec> worst_vector;  // first offending input, if any
};

/// Samples heavy-tailed test vectors (normal / student-t(3) / sparse spikes)
/// and checks the contraction inequality: per sample for deterministic kinds,
/// pooled mean within 3 standard errors for random_k (redraws_per_vector
/// redraws of each sampled vector).
ContractionReport verify_contraction(const CompressorSpec& spec, int n_trials,
                                     int dim, std::uint64_t seed,
                                     int redraws_per_vector = 1000);

}  // namespace decadam
