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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "decadam/compression.hpp"
#include "decadam/optimizer.hpp"
#include "decadam/problems.hpp"
#include "decadam/topology.hpp"
#include "decadam/types.hpp"

namespace decadam {

// The simulation loop: K workers run local adaptive steps and gossip over a
// fixed mixing matrix every `period` iterations, either exchanging full
// iterates or (compressed variant) quantized differences against replicated
// hat-variables.

enum class Algorithm { d_adam, cd_adam, d_psgd, d_adam_vanilla };

std::string to_string(Algorithm alg);
Algorithm algorithm_from_string(const std::string& s);

struct TopologySpec {
  TopologyKind kind = TopologyKind::ring;  // default setup: 8-worker ring
  int num_workers = 8;
  WeightRule weight_rule = WeightRule::uniform_neighbor;

  bool operator==(const TopologySpec&) const = default;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::quadratic;
  int dim = 1;
  double heterogeneity = 0.0;
  double sigma = 0.0;  // uniform per-coordinate noise scale
  std::optional<double> clip_G;
  int batch = 1;
  NoiseKind noise = NoiseKind::gaussian;

  bool operator==(const ProblemSpec&) const = default;
};

/// Consensus step size for the compressed variant; either the fixed value
/// or resolved at run time from the stability formula.
struct GammaSetting {
  bool auto_mode = false;
  double value = 0.4;

  bool operator==(const GammaSetting&) const = default;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::d_adam;
  TopologySpec topology;
  AdamHyper adam;
  /// Numerator of the local step: the first moment (d_adam default) or the
  /// raw gradient (cd_adam default). Unset picks the per-algorithm default.
  std::optional<bool> use_momentum_in_step;
  int period = 1;  // local iterations per gossip round
  GammaSetting gamma;
  std::optional<CompressorSpec> compressor;  // cd_adam only
  ProblemSpec problem;
  long total_iters = 100;
  std::uint64_t seed = 0;
  int eval_every = 100;

  /// Throws ConfigError on inconsistent settings (p < 1, cd_adam without a
  /// compressor, ...).
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

/// Effective algorithm parameters after per-algorithm defaults are applied.
bool resolved_use_momentum(const RunConfig& cfg);
int resolved_period(const RunConfig& cfg);  // d_adam_vanilla forces 1

struct WorkerState {
  Vec x;
  MomentState moments;
  // Compressed variant only: this worker's hat-variable plus its replicas of
  // every neighbor's. Replicas must stay bit-identical to the owners'
  // copies at every iteration boundary.
  Vec x_hat_self;
  std::map<int, Vec> x_hat_neighbors;
};

std::vector<WorkerState> init_workers(const Vec& x0, const Topology& topo,
                                      bool with_hats);

struct StepContext {
  const Topology* topology = nullptr;
  AdamHyper hyper;
  int period = 1;
  bool use_momentum = true;
  double gamma = 0.4;                 // cd_adam
  CompressorSpec compressor;          // cd_adam
  std::uint64_t seed = 0;             // random_k compression streams
};

// One iteration t -> t+1 on injected per-worker gradients. Returns the bits
// put on the wire this iteration (zero off communication rounds).
std::uint64_t step_d_adam(std::vector<WorkerState>& workers, long t,
                          const StepContext& ctx, const std::vector<Vec>& grads);
std::uint64_t step_cd_adam(std::vector<WorkerState>& workers, long t,
                           const StepContext& ctx, const std::vector<Vec>& grads);
std::uint64_t step_d_psgd(std::vector<WorkerState>& workers, long t,
                          const StepContext& ctx, const std::vector<Vec>& grads);

/// Sum_k ||x_k - xbar||^2.
double consensus_error(const std::vector<WorkerState>& workers);

/// Mean iterate, accumulated in ascending worker order.
Vec averaged_iterate(const std::vector<WorkerState>& workers);

struct TraceRow {
  long t = 0;
  double loss = 0.0;           // f(xbar_t), exact objective
  double grad_norm_sq = 0.0;   // ||grad f(xbar_t)||^2, exact
  double consensus_err = 0.0;  // sum_k ||x_k - xbar||^2
  std::uint64_t comm_bits_cum = 0;
  long comm_rounds_cum = 0;
};

struct RunSummary {
  double final_loss = 0.0;
  double final_grad_norm_sq = 0.0;
  double avg_grad_norm_sq = 0.0;  // (1/T) sum_t ||grad f(xbar_t)||^2
  double max_consensus_err = 0.0; // over every iteration, not just eval rows
  double empirical_G = 0.0;       // max |g_j| seen from the stochastic oracle
  std::uint64_t comm_bits_total = 0;
  long comm_rounds_total = 0;
  double topology_rho = 0.0;
  double topology_second_eig_mod = 0.0;
  double resolved_gamma = 0.0;
  bool use_momentum_in_step = false;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  RunSummary summary;
};

struct RunHooks {
  /// Called with the state X_t at the top of each iteration (t = 0..T-1) and
  /// once more with the final state (t = T).
  std::function<void(long t, const std::vector<WorkerState>&)> on_state;
  /// Every stochastic gradient drawn, in (t, ascending k) order.
  std::function<void(long t, int k, const Vec& g)> on_gradient;
};

/// Executes the configured algorithm for total_iters iterations. All metric
/// rows are exact-objective evaluations at the averaged iterate. Fully
/// deterministic given the seed.
RunTrace run(const RunConfig& cfg);

/// Same, with externally constructed problem/topology (they must match the
/// config) and optional observation hooks.
RunTrace run(const RunConfig& cfg, const Problem& problem,
             const Topology& topology, const RunHooks* hooks = nullptr);

Problem build_problem(const ProblemSpec& spec, int num_workers,
                      std::uint64_t seed);

}  // namespace decadam
