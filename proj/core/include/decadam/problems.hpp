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
#include <variant>
#include <vector>

#include "decadam/rng.hpp"
#include "decadam/types.hpp"

namespace decadam {

// Desk-scale objective suites with one smooth loss per worker, exact
// gradients, a noisy unbiased stochastic oracle, and known smoothness /
// variance constants.

enum class ProblemKind { quadratic, logistic, nonconvex_toy };
enum class NoiseKind { gaussian, student_t };

std::string to_string(ProblemKind kind);
std::string to_string(NoiseKind kind);
ProblemKind problem_kind_from_string(const std::string& s);
NoiseKind noise_kind_from_string(const std::string& s);

struct OracleOptions {
  Vec sigma;                        // per-coordinate noise scale, size d
  std::optional<double> clip_G;     // per-coordinate clip bound (optional)
  int batch = 1;                    // divides sigma by sqrt(batch)
  NoiseKind noise = NoiseKind::gaussian;
};

namespace problem_detail {

struct QuadraticData {
  std::vector<Mat> a;
  std::vector<Vec> b;
  double mu = 0.0;
};

struct LogisticData {
  std::vector<Mat> features;  // one n_k x d block per worker
  std::vector<Vec> labels;    // entries in {-1, +1}
  double mu = 0.0;
};

struct ToyData {
  std::vector<Vec> centers;  // one center per worker
  Vec scales;                // shared positive per-coordinate scales
};

}  // namespace problem_detail

class Problem {
 public:
  /// heterogeneity = 0 gives identical per-worker objectives; 1 gives
  /// maximally dissimilar data (disjoint label clusters for logistic).
  /// Deterministic in (kind, num_workers, dim, heterogeneity, seed); worker
  /// k's data depends only on its own generation stream, so growing the
  /// worker count leaves existing workers' objectives unchanged.
  static Problem make_heterogeneous(ProblemKind kind, int num_workers, int dim,
                                    double heterogeneity, std::uint64_t seed,
                                    OracleOptions opts);

  /// Explicit quadratic suite 0.5*||A_k x - b_k||^2 + mu*||x||^2.
  static Problem from_quadratics(std::vector<Mat> a, std::vector<Vec> b,
                                 double mu, OracleOptions opts);

  ProblemKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int num_workers() const { return num_workers_; }

  /// Smoothness constant: exact for quadratic and the toy family,
  /// a spectral upper bound for logistic.
  double smoothness() const { return smoothness_; }

  const Vec& sigma() const { return opts_.sigma; }
  std::optional<double> clip_G() const { return opts_.clip_G; }
  int batch() const { return opts_.batch; }
  NoiseKind noise_kind() const { return opts_.noise; }

  /// Known optimum of the averaged objective (closed form for quadratics).
  std::optional<double> f_star() const { return f_star_; }
  std::optional<Vec> minimizer() const { return minimizer_; }

  double objective(int worker, const Vec& x) const;
  Vec full_gradient(int worker, const Vec& x) const;

  /// Exact gradient plus independent per-coordinate noise (scale
  /// sigma_j/sqrt(batch)), clipped to [-G, G] per coordinate when clip_G is
  /// set. Deterministic given the rng stream.
  Vec stochastic_gradient(int worker, const Vec& x, CounterRng& rng) const;

  double global_objective(const Vec& x) const;
  Vec global_gradient(const Vec& x) const;

 private:
  using QuadraticData = problem_detail::QuadraticData;
  using LogisticData = problem_detail::LogisticData;
  using ToyData = problem_detail::ToyData;

  Problem() = default;
  void finalize_quadratic();

  ProblemKind kind_ = ProblemKind::quadratic;
  int dim_ = 0;
  int num_workers_ = 0;
  double smoothness_ = 0.0;
  std::optional<double> f_star_;
  std::optional<Vec> minimizer_;
  OracleOptions opts_;
  std::variant<QuadraticData, LogisticData, ToyData> data_;
};

}  // namespace decadam
