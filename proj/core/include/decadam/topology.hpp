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

#include <string>
#include <vector>

#include "decadam/types.hpp"

namespace decadam {

enum class TopologyKind { ring, complete, grid2d, star_regularized };
enum class WeightRule { uniform_neighbor, metropolis };

std::string to_string(TopologyKind kind);
std::string to_string(WeightRule rule);
TopologyKind topology_kind_from_string(const std::string& s);
WeightRule weight_rule_from_string(const std::string& s);

/// A gossip communication graph together with its symmetric doubly
/// stochastic mixing matrix and spectral data. Immutable after construction.
struct Topology {
  int num_workers = 0;
  Mat weights;  // K x K, symmetric, rows/cols sum to 1
  std::vector<std::vector<int>> neighbor_lists;  // sorted, self excluded
  double second_eig_mod = 0.0;  // |lambda_2|
  double spectral_gap = 0.0;    // rho = 1 - |lambda_2|

  int degree(int worker) const {
    return static_cast<int>(neighbor_lists[worker].size());
  }
};

struct SpectralInfo {
  double second_eig_mod;
  double spectral_gap;
};

/// Throws ValidationError naming the first violated row/column when the
/// matrix is not symmetric doubly stochastic within `tol`.
void validate_mixing_matrix(const Mat& weights, double tol = 1e-10);

/// Modulus of the second-largest eigenvalue and the spectral gap,
/// via a symmetric eigendecomposition. Input validated with 1e-10 tolerance.
SpectralInfo spectral_gap(const Mat& weights);

/// All eigenvalues of the mixing matrix, descending.
std::vector<double> mixing_eigenvalues(const Mat& weights);

/// max_i (1 - lambda_i); the beta constant used by the stability formula
/// for the compressed-gossip step size.
double mixing_beta(const Mat& weights);

/// ||W - (1/K) 11^T||_2 <= 1 - rho within 1e-10. Holds for every valid
/// mixing matrix; exercised as a structural self-check.
bool check_spectral_deflation(const Mat& weights);

/// Builds one of the supported graph families. A disconnected result
/// (spectral gap below 1e-12) is rejected with a "zero spectral gap" error.
/// star_regularized always uses metropolis weights; uniform weights are not
/// doubly stochastic on irregular graphs.
Topology build_topology(TopologyKind kind, int num_workers, WeightRule rule);

/// Wraps an explicit mixing matrix, deriving neighbor lists from the nonzero
/// off-diagonal pattern. Same validation and connectivity rejection as above.
Topology topology_from_matrix(const Mat& weights);

}  // namespace decadam
