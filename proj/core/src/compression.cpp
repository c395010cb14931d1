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

#include "decadam/compression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "decadam/errors.hpp"

namespace decadam {

namespace {

constexpr double kFloatBits = 32.0;

int index_bits(int dim) {
  if (dim <= 1) return 0;
  return std::bit_width(static_cast<unsigned>(dim - 1));
}

double sign_plus(double v) { return v < 0.0 ? -1.0 : 1.0; }  // sign(0) = +1

}  // namespace

std::string to_string(CompressorKind kind) {
  switch (kind) {
    case CompressorKind::identity: return "identity";
    case CompressorKind::scaled_sign: return "scaled_sign";
    case CompressorKind::top_k: return "top_k";
    case CompressorKind::random_k: return "random_k";
  }
  return "?";
}

CompressorKind compressor_kind_from_string(const std::string& s) {
  if (s == "identity") return CompressorKind::identity;
  if (s == "scaled_sign") return CompressorKind::scaled_sign;
  if (s == "top_k") return CompressorKind::top_k;
  if (s == "random_k") return CompressorKind::random_k;
  throw ValidationError("unknown compressor kind: " + s);
}

void CompressorSpec::validate(int dim) const {
  if (dim < 1) throw ValidationError("compressor input must be nonempty");
  if (kind == CompressorKind::top_k || kind == CompressorKind::random_k) {
    if (k < 1 || k > dim)
      throw ValidationError("compressor k=" + std::to_string(k) +
                            " out of range for dim=" + std::to_string(dim));
  }
}

double CompressorSpec::guaranteed_delta(int dim) const {
  validate(dim);
  switch (kind) {
    case CompressorKind::identity:
      return 1.0;
    case CompressorKind::scaled_sign:
      return 1.0 / dim;  // worst case: 1-sparse input
    case CompressorKind::top_k:
    case CompressorKind::random_k:
      return static_cast<double>(k) / dim;
  }
  return 1.0;
}

std::uint64_t payload_bits(const CompressorSpec& spec, int dim) {
  spec.validate(dim);
  switch (spec.kind) {
    case CompressorKind::identity:
      return static_cast<std::uint64_t>(kFloatBits) * dim;
    case CompressorKind::scaled_sign:
      return static_cast<std::uint64_t>(dim) + 32;  // 1 sign bit/coord + scale
    case CompressorKind::top_k:
      return static_cast<std::uint64_t>(spec.k) * (32 + index_bits(dim));
    case CompressorKind::random_k:
      return static_cast<std::uint64_t>(spec.k) * 32 + 32;  // values + seed
  }
  return 0;
}

double scaled_sign_delta(const Vec& x) {
  const double sq = x.squaredNorm();
  if (sq == 0.0) return 1.0;
  const double l1 = x.lpNorm<1>();
  return l1 * l1 / (static_cast<double>(x.size()) * sq);
}

CompressResult compress(const CompressorSpec& spec, const Vec& x,
                        CounterRng& rng) {
  const int d = static_cast<int>(x.size());
  spec.validate(d);
  CompressResult out;
  out.payload_bits = payload_bits(spec, d);
  switch (spec.kind) {
    case CompressorKind::identity:
      out.q = x;
      break;
    case CompressorKind::scaled_sign: {
      if (x.squaredNorm() == 0.0) {
        out.q = Vec::Zero(d);
        break;
      }
      const double scale = x.lpNorm<1>() / d;
      out.q = Vec(d);
      for (int i = 0; i < d; ++i) out.q[i] = scale * sign_plus(x[i]);
      break;
    }
    case CompressorKind::top_k: {
      std::vector<int> idx(d);
      std::iota(idx.begin(), idx.end(), 0);
      // Ties break toward the lower index so selection is deterministic.
      std::stable_sort(idx.begin(), idx.end(), [&x](int a, int b) {
        return std::abs(x[a]) > std::abs(x[b]);
      });
      out.q = Vec::Zero(d);
      for (int i = 0; i < spec.k; ++i) out.q[idx[i]] = x[idx[i]];
      break;
    }
    case CompressorKind::random_k: {
      // Contraction, not an unbiased estimator: selected coordinates are
      // kept as-is, with no 1/p rescaling.
      const auto kept = rng.sample_without_replacement(d, spec.k);
      out.q = Vec::Zero(d);
      for (int i : kept) out.q[i] = x[i];
      break;
    }
  }
  return out;
}

namespace {

/// Heavy-tailed sample mixture for the contraction certification.
Vec contraction_test_vector(int dim, int trial, CounterRng& rng) {
  Vec x(dim);
  switch (trial % 3) {
    case 0:
      for (int i = 0; i < dim; ++i) x[i] = rng.normal();
      break;
    case 1:
      for (int i = 0; i < dim; ++i) x[i] = rng.student_t3_unit();
      break;
    default:
      for (int i = 0; i < dim; ++i) {
        const bool spike = rng.uniform01() < 0.1;
        x[i] = spike ? 10.0 * rng.student_t3_unit() : 0.0;
      }
      break;
  }
  if (x.squaredNorm() == 0.0) x[trial % dim] = 1.0;
  return x;
}

}  // namespace

ContractionReport verify_contraction(const CompressorSpec& spec, int n_trials,
                                     int dim, std::uint64_t seed,
                                     int redraws_per_vector) {
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  spec.validate(dim);

  ContractionReport report;
  report.kind = spec.kind;
  report.dim = dim;
  report.trials = n_trials;
  const double delta = spec.guaranteed_delta(dim);

  CounterRng sample_rng(seed, StreamPurpose::verification, 1);
  CounterRng q_rng(seed, StreamPurpose::verification, 2);

  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;
  const int redraws = spec.deterministic() ? 1 : std::max(1, redraws_per_vector);

  for (int trial = 0; trial < n_trials; ++trial) {
    const Vec x = contraction_test_vector(dim, trial, sample_rng);
    const double x_sq = x.squaredNorm();
    for (int r = 0; r < redraws; ++r) {
      const auto res = compress(spec, x, q_rng);
      const double ratio = (x - res.q).squaredNorm() / x_sq;
      sum += ratio;
      sum_sq += ratio * ratio;
      ++count;
      report.max_ratio = std::max(report.max_ratio, ratio);
      if (spec.deterministic() && ratio > 1.0 - delta + 1e-12) {
        ++report.violations;
        if (!report.worst_vector) report.worst_vector = x;
      }
    }
  }

  report.mean_ratio = sum / static_cast<double>(count);
  if (spec.deterministic()) {
    report.threshold = 1.0 - delta + 1e-12;
    report.satisfied = report.violations == 0;
  } else {
    const double var =
        std::max(0.0, sum_sq / count - report.mean_ratio * report.mean_ratio);
    report.standard_error = std::sqrt(var / static_cast<double>(count));
    report.threshold = 1.0 - delta + 3.0 * report.standard_error;
    report.satisfied = report.mean_ratio <= report.threshold;
    if (!report.satisfied) report.violations = 1;
  }
  return report;
}

}  // namespace decadam
