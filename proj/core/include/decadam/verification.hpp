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
#include <string>
#include <vector>

#include "decadam/engine.hpp"

namespace decadam {

// Self-contained correctness suites, shared by the `verify` CLI subcommand
// and the acceptance tests.

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> failures;  // empty when passed
  std::string detail;                 // one-line summary statistic
};

/// Symmetric doubly stochastic matrix with strictly positive entries,
/// generated by symmetrizing a random matrix and Sinkhorn-balancing it.
Mat random_doubly_stochastic(int num_workers, CounterRng& rng);

/// Every generated family passes symmetry/stochasticity validation and the
/// spectral deflation bound; ring gaps match the circulant closed form for
/// K in [3, 32]; `n_random` Sinkhorn matrices validate as well.
SuiteResult verify_mixing_suite(std::uint64_t seed, int n_random = 1000);

/// Contraction certification of all four operators on `n_trials`
/// heavy-tailed vectors of dimension `dim`.
SuiteResult verify_contraction_suite(std::uint64_t seed, int n_trials = 10000,
                                     int dim = 16);

/// Runs one config through the node-level engine and the matrix-form
/// reference on an identical recorded gradient stream; returns the largest
/// relative entry discrepancy across all iterates.
double run_equivalence_case(const RunConfig& cfg);

/// Draws a deterministic family of random configs (both algorithms, K <= 8,
/// d <= 32, p in {1,2,4}, all compressor kinds) and checks every case
/// against `tol`.
SuiteResult verify_equivalence_suite(std::uint64_t seed, int n_configs = 20,
                                     long steps = 200, double tol = 1e-12);

}  // namespace decadam
