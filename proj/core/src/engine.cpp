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

#include "decadam/engine.hpp"

#include <cmath>
#include <cstring>

#include "decadam/bounds.hpp"
#include "decadam/errors.hpp"

namespace decadam {

namespace {

constexpr double kFullPrecisionBits = 32.0;

bool is_comm_round(long t, int period) { return (t + 1) % period == 0; }

void require_finite(const Vec& g, long t, int worker) {
  if (!all_finite(g))
    throw EngineError("non-finite gradient at iteration " + std::to_string(t) +
                      ", worker " + std::to_string(worker));
}

std::vector<Vec> local_steps_adam(std::vector<WorkerState>& workers, long t,
                                  const StepContext& ctx,
                                  const std::vector<Vec>& grads) {
  const int k_workers = static_cast<int>(workers.size());
  std::vector<Vec> half(k_workers);
  for (int k = 0; k < k_workers; ++k) {
    require_finite(grads[k], t, k);
    auto step = adam_local_step(workers[k].x, workers[k].moments, grads[k],
                                ctx.hyper, ctx.use_momentum);
    workers[k].moments = std::move(step.state);
    half[k] = std::move(step.x_half);
  }
  return half;
}

/// Full-precision gossip: x_k <- sum_j w_kj x_half_j over the closed
/// neighborhood, accumulated in ascending j with zero weights skipped.
std::uint64_t gossip_average(std::vector<WorkerState>& workers,
                             const Topology& topo, std::vector<Vec>& half) {
  const int k_workers = static_cast<int>(workers.size());
  const int dim = static_cast<int>(half[0].size());
  std::uint64_t bits = 0;
  for (int k = 0; k < k_workers; ++k) {
    Vec acc = Vec::Zero(dim);
    for (int j = 0; j < k_workers; ++j) {
      const double w = topo.weights(k, j);
      if (w != 0.0) acc += w * half[j];
    }
    workers[k].x = std::move(acc);
    bits += static_cast<std::uint64_t>(topo.degree(k)) *
            static_cast<std::uint64_t>(kFullPrecisionBits) * dim;
  }
  return bits;
}

void adopt_half_iterates(std::vector<WorkerState>& workers,
                         std::vector<Vec>& half) {
  for (std::size_t k = 0; k < workers.size(); ++k)
    workers[k].x = std::move(half[k]);
}

void check_replica_coherence(const std::vector<WorkerState>& workers) {
  for (std::size_t k = 0; k < workers.size(); ++k) {
    for (const auto& [j, replica] : workers[k].x_hat_neighbors) {
      const Vec& owner = workers[j].x_hat_self;
      if (replica.size() != owner.size() ||
          std::memcmp(replica.data(), owner.data(),
                      sizeof(double) * owner.size()) != 0) {
        throw EngineError("hat-variable replica of worker " +
                          std::to_string(j) + " held by worker " +
                          std::to_string(k) + " diverged from the owner");
      }
    }
  }
}

}  // namespace

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::d_adam: return "d_adam";
    case Algorithm::cd_adam: return "cd_adam";
    case Algorithm::d_psgd: return "d_psgd";
    case Algorithm::d_adam_vanilla: return "d_adam_vanilla";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "d_adam") return Algorithm::d_adam;
  if (s == "cd_adam") return Algorithm::cd_adam;
  if (s == "d_psgd") return Algorithm::d_psgd;
  if (s == "d_adam_vanilla") return Algorithm::d_adam_vanilla;
  throw ConfigError("unknown algorithm: " + s);
}

void RunConfig::validate() const {
  adam.validate();
  if (period < 1) throw ConfigError("p must be >= 1");
  if (total_iters < 1) throw ConfigError("T must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (topology.num_workers < 1) throw ConfigError("topology.K must be >= 1");
  if (problem.dim < 1) throw ConfigError("problem.d must be >= 1");
  if (problem.heterogeneity < 0.0 || problem.heterogeneity > 1.0)
    throw ConfigError("problem.heterogeneity must be in [0,1]");
  if (problem.sigma < 0.0) throw ConfigError("problem.sigma must be >= 0");
  if (problem.batch < 1) throw ConfigError("problem.batch must be >= 1");
  if (problem.clip_G && !(*problem.clip_G > 0.0))
    throw ConfigError("problem.clip_G must be > 0");
  if (algorithm == Algorithm::cd_adam) {
    if (!compressor) throw ConfigError("compressor required");
    compressor->validate(problem.dim);
    if (!gamma.auto_mode && !(gamma.value > 0.0 && gamma.value <= 1.0))
      throw ConfigError("gamma must be in (0,1] or \"auto\"");
  }
}

bool resolved_use_momentum(const RunConfig& cfg) {
  if (cfg.use_momentum_in_step) return *cfg.use_momentum_in_step;
  // The full-precision variant steps with the first moment, the compressed
  // variant with the raw gradient.
  return cfg.algorithm != Algorithm::cd_adam;
}

int resolved_period(const RunConfig& cfg) {
  return cfg.algorithm == Algorithm::d_adam_vanilla ? 1 : cfg.period;
}

std::vector<WorkerState> init_workers(const Vec& x0, const Topology& topo,
                                      bool with_hats) {
  std::vector<WorkerState> workers(topo.num_workers);
  const int dim = static_cast<int>(x0.size());
  for (int k = 0; k < topo.num_workers; ++k) {
    workers[k].x = x0;
    workers[k].moments = MomentState::zeros(dim);
    if (with_hats) {
      // x_hat_0 = x_0 everywhere: zero initial compression error, and every
      // replica is known without communication since x_0 is shared.
      workers[k].x_hat_self = x0;
      for (int j : topo.neighbor_lists[k]) workers[k].x_hat_neighbors[j] = x0;
    }
  }
  return workers;
}

double consensus_error(const std::vector<WorkerState>& workers) {
  // sum_k ||x_k - xbar||^2 via the pairwise identity
  // (1/K) sum_{i<j} ||x_i - x_j||^2: exact zero for identical workers and no
  // cancellation against a rounded mean.
  const std::size_t k = workers.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      sum += (workers[i].x - workers[j].x).squaredNorm();
  return sum / static_cast<double>(k);
}

Vec averaged_iterate(const std::vector<WorkerState>& workers) {
  Vec acc = Vec::Zero(workers[0].x.size());
  for (const auto& w : workers) acc += w.x;
  return acc / static_cast<double>(workers.size());
}

std::uint64_t step_d_adam(std::vector<WorkerState>& workers, long t,
                          const StepContext& ctx,
                          const std::vector<Vec>& grads) {
  auto half = local_steps_adam(workers, t, ctx, grads);
  if (is_comm_round(t, ctx.period))
    return gossip_average(workers, *ctx.topology, half);
  adopt_half_iterates(workers, half);
  return 0;
}

std::uint64_t step_d_psgd(std::vector<WorkerState>& workers, long t,
                          const StepContext& ctx,
                          const std::vector<Vec>& grads) {
  const int k_workers = static_cast<int>(workers.size());
  std::vector<Vec> half(k_workers);
  for (int k = 0; k < k_workers; ++k) {
    require_finite(grads[k], t, k);
    half[k] = workers[k].x - ctx.hyper.eta * grads[k];
  }
  if (is_comm_round(t, ctx.period))
    return gossip_average(workers, *ctx.topology, half);
  adopt_half_iterates(workers, half);
  return 0;
}

std::uint64_t step_cd_adam(std::vector<WorkerState>& workers, long t,
                           const StepContext& ctx,
                           const std::vector<Vec>& grads) {
  const Topology& topo = *ctx.topology;
  const int k_workers = static_cast<int>(workers.size());
  auto half = local_steps_adam(workers, t, ctx, grads);
  if (!is_comm_round(t, ctx.period)) {
    adopt_half_iterates(workers, half);  // x and every hat carried unchanged
    return 0;
  }

  // Mixing uses only locally stored replicas; no bits move here. The
  // neighbor-difference sum is evaluated as the closed-neighborhood weighted
  // hat average minus the own hat (equal since weights sum to 1), the one
  // float-level convention shared with the matrix-form reference: the
  // discontinuous compressors would otherwise amplify any rounding gap
  // between the two routes.
  for (int k = 0; k < k_workers; ++k) {
    Vec acc = Vec::Zero(half[k].size());
    for (int j = 0; j < k_workers; ++j) {
      const double w = topo.weights(k, j);
      if (w == 0.0) continue;
      const Vec& hat = (j == k) ? workers[k].x_hat_self
                                : workers[k].x_hat_neighbors.at(j);
      acc += w * hat;
    }
    workers[k].x = half[k] + ctx.gamma * (acc - workers[k].x_hat_self);
  }

  // Compressed exchange: q_k = Q(x_k - hat_k), then every replica of hat_k
  // (the owner's included) advances by the same q_k.
  const long round = (t + 1) / ctx.period;
  std::vector<Vec> q(k_workers);
  std::uint64_t bits = 0;
  for (int k = 0; k < k_workers; ++k) {
    CounterRng rng(ctx.seed, StreamPurpose::compressor,
                   static_cast<std::uint64_t>(k),
                   static_cast<std::uint64_t>(round));
    auto res = compress(ctx.compressor, workers[k].x - workers[k].x_hat_self,
                        rng);
    q[k] = std::move(res.q);
    bits += res.payload_bits * static_cast<std::uint64_t>(topo.degree(k));
  }
  for (int k = 0; k < k_workers; ++k) {
    workers[k].x_hat_self += q[k];
    for (int j : topo.neighbor_lists[k]) workers[k].x_hat_neighbors[j] += q[j];
  }
  check_replica_coherence(workers);
  return bits;
}

Problem build_problem(const ProblemSpec& spec, int num_workers,
                      std::uint64_t seed) {
  OracleOptions opts;
  opts.sigma = Vec::Constant(spec.dim, spec.sigma);
  opts.clip_G = spec.clip_G;
  opts.batch = spec.batch;
  opts.noise = spec.noise;
  return Problem::make_heterogeneous(spec.kind, num_workers, spec.dim,
                                     spec.heterogeneity, seed, std::move(opts));
}

RunTrace run(const RunConfig& cfg) {
  cfg.validate();
  const Topology topo = build_topology(cfg.topology.kind,
                                       cfg.topology.num_workers,
                                       cfg.topology.weight_rule);
  const Problem problem = build_problem(cfg.problem, cfg.topology.num_workers,
                                        cfg.seed);
  return run(cfg, problem, topo, nullptr);
}

RunTrace run(const RunConfig& cfg, const Problem& problem,
             const Topology& topology, const RunHooks* hooks) {
  cfg.validate();
  if (problem.num_workers() != topology.num_workers)
    throw EngineError("problem/topology worker count mismatch");

  const int k_workers = topology.num_workers;
  const int dim = problem.dim();
  const long total = cfg.total_iters;
  const int period = resolved_period(cfg);
  const bool cd = cfg.algorithm == Algorithm::cd_adam;

  StepContext ctx;
  ctx.topology = &topology;
  ctx.hyper = cfg.adam;
  ctx.period = period;
  ctx.use_momentum = resolved_use_momentum(cfg);
  ctx.seed = cfg.seed;
  if (cd) {
    ctx.compressor = *cfg.compressor;
    ctx.gamma = cfg.gamma.auto_mode
                    ? stability_gamma(topology.spectral_gap,
                                      mixing_beta(topology.weights),
                                      ctx.compressor.guaranteed_delta(dim))
                    : cfg.gamma.value;
  }

  auto workers = init_workers(Vec::Zero(dim), topology, cd);
  std::vector<CounterRng> grad_rngs;
  grad_rngs.reserve(k_workers);
  for (int k = 0; k < k_workers; ++k)
    grad_rngs.emplace_back(cfg.seed, StreamPurpose::gradient_noise,
                           static_cast<std::uint64_t>(k));

  RunTrace out;
  RunSummary& sum = out.summary;
  sum.topology_rho = topology.spectral_gap;
  sum.topology_second_eig_mod = topology.second_eig_mod;
  sum.resolved_gamma = cd ? ctx.gamma : 0.0;
  sum.use_momentum_in_step = ctx.use_momentum;

  std::uint64_t bits = 0;
  long rounds = 0;
  double grad_norm_sq_sum = 0.0;
  std::vector<Vec> grads(k_workers);

  auto evaluate = [&](long t) {
    const Vec xbar = averaged_iterate(workers);
    TraceRow row;
    row.t = t;
    row.loss = problem.global_objective(xbar);
    row.grad_norm_sq = problem.global_gradient(xbar).squaredNorm();
    row.consensus_err = consensus_error(workers);
    row.comm_bits_cum = bits;
    row.comm_rounds_cum = rounds;
    return row;
  };

  for (long t = 0; t < total; ++t) {
    const TraceRow row = evaluate(t);
    grad_norm_sq_sum += row.grad_norm_sq;
    sum.max_consensus_err = std::max(sum.max_consensus_err, row.consensus_err);
    if (hooks && hooks->on_state) hooks->on_state(t, workers);
    if (t % cfg.eval_every == 0) out.rows.push_back(row);

    for (int k = 0; k < k_workers; ++k) {
      grads[k] = problem.stochastic_gradient(k, workers[k].x, grad_rngs[k]);
      if (!all_finite(grads[k]))
        throw EngineError("non-finite gradient at iteration " +
                          std::to_string(t) + ", worker " + std::to_string(k));
      sum.empirical_G =
          std::max(sum.empirical_G, grads[k].cwiseAbs().maxCoeff());
      if (hooks && hooks->on_gradient) hooks->on_gradient(t, k, grads[k]);
    }

    switch (cfg.algorithm) {
      case Algorithm::d_adam:
      case Algorithm::d_adam_vanilla:
        bits += step_d_adam(workers, t, ctx, grads);
        break;
      case Algorithm::cd_adam:
        bits += step_cd_adam(workers, t, ctx, grads);
        break;
      case Algorithm::d_psgd:
        bits += step_d_psgd(workers, t, ctx, grads);
        break;
    }
    if (is_comm_round(t, period)) ++rounds;
  }

  const TraceRow final_row = evaluate(total);
  sum.max_consensus_err =
      std::max(sum.max_consensus_err, final_row.consensus_err);
  if (hooks && hooks->on_state) hooks->on_state(total, workers);
  if (out.rows.empty() || out.rows.back().t != total)
    out.rows.push_back(final_row);

  sum.final_loss = final_row.loss;
  sum.final_grad_norm_sq = final_row.grad_norm_sq;
  sum.avg_grad_norm_sq = grad_norm_sq_sum / static_cast<double>(total);
  sum.comm_bits_total = bits;
  sum.comm_rounds_total = rounds;
  return out;
}

}  // namespace decadam
