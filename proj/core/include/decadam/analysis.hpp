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

#include "decadam/bounds.hpp"
#include "decadam/engine.hpp"

namespace decadam {

// Numeric checkers for the consensus bounds and for the trends the
// convergence results predict (period insensitivity, speedup in the worker
// count, compression savings).

enum class ConsensusBoundKind { gossip, compressed };

struct BoundInputs {
  double d = 0, eta = 0, p = 0, G = 0, K = 0, tau = 0, rho = 0;
  double delta = 0, alpha = 0;  // compressed bound only
};

struct BoundReport {
  std::string bound_name;
  double theoretical_value = 0.0;
  double empirical_value = 0.0;
  bool satisfied = false;  // empirical <= theoretical * (1 + 1e-9)
  BoundInputs inputs;
};

/// Compares the max-over-t consensus error observed in a finished run
/// against the matching bound value. G is the clip bound when set, else the
/// empirical max |g_j| recorded during the run. Throws on an
/// algorithm/bound mismatch.
BoundReport check_consensus_bound(const RunSummary& summary,
                                  const RunConfig& cfg, ConsensusBoundKind which);

struct SpeedupPoint {
  int num_workers = 0;
  double mean_avg_grad_norm_sq = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_seed;  // sorted by seed
};

/// Runs the base problem family at each worker count with the prescribed
/// scalings eta = 0.1 sqrt(K/T) and tau = min(0.5, sqrt(K)/L), n_seeds
/// seeds per point, and reports (1/T) sum_t ||grad f(xbar_t)||^2 statistics.
std::vector<SpeedupPoint> speedup_curve(const RunConfig& base,
                                        const std::vector<int>& k_list,
                                        long total_iters, int n_seeds,
                                        int jobs = 1);

/// True when successive means are nonincreasing within `z` pooled standard
/// errors of the difference.
bool nonincreasing_within_se(const std::vector<SpeedupPoint>& points,
                             double z = 2.0);

struct PeriodPoint {
  int period = 0;
  double final_loss_mean = 0.0;
  double final_loss_se = 0.0;
  std::uint64_t comm_bits = 0;  // identical across seeds by construction
  long comm_rounds = 0;
};

/// Sweeps the communication period, averaging the final exact loss over
/// n_seeds seeds and reporting the (deterministic) communication cost.
std::vector<PeriodPoint> period_sensitivity(const RunConfig& base,
                                            const std::vector<int>& p_list,
                                            long total_iters, int n_seeds,
                                            int jobs = 1);

}  // namespace decadam
