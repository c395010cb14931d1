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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "decadam/engine.hpp"
#include "decadam/errors.hpp"

using namespace decadam;

namespace {

RunConfig quadratic_config(Algorithm alg, int k_workers, int dim, long total) {
  RunConfig cfg;
  cfg.algorithm = alg;
  cfg.topology.kind = TopologyKind::ring;
  cfg.topology.num_workers = k_workers;
  cfg.problem.kind = ProblemKind::quadratic;
  cfg.problem.dim = dim;
  cfg.problem.heterogeneity = 0.5;
  cfg.problem.sigma = 0.1;
  cfg.total_iters = total;
  cfg.eval_every = 1;
  cfg.seed = 99;
  if (alg == Algorithm::cd_adam)
    cfg.compressor = CompressorSpec{CompressorKind::scaled_sign, 0};
  return cfg;
}

}  // namespace

TEST_CASE("K=1 reproduces sequential adam bit for bit") {
  RunConfig cfg = quadratic_config(Algorithm::d_adam, 1, 6, 300);
  cfg.period = 4;
  const Topology topo = build_topology(cfg.topology.kind, 1,
                                       cfg.topology.weight_rule);
  const Problem problem = build_problem(cfg.problem, 1, cfg.seed);

  std::vector<Vec> engine_xs;
  RunHooks hooks;
  hooks.on_state = [&](long, const std::vector<WorkerState>& ws) {
    engine_xs.push_back(ws[0].x);
  };
  run(cfg, problem, topo, &hooks);

  // Sequential reference: plain adam loop over the same oracle stream.
  CounterRng rng(cfg.seed, StreamPurpose::gradient_noise, 0);
  Vec x = Vec::Zero(6);
  MomentState state = MomentState::zeros(6);
  for (long t = 0; t < cfg.total_iters; ++t) {
    CHECK((engine_xs[t] - x).squaredNorm() == 0.0);
    const Vec g = problem.stochastic_gradient(0, x, rng);
    auto step = adam_local_step(x, state, g, cfg.adam, true);
    x = step.x_half;
    state = step.state;
  }
  CHECK((engine_xs.back() - x).squaredNorm() == 0.0);
}

TEST_CASE("identical data and zero noise keep workers exactly equal") {
  RunConfig cfg = quadratic_config(Algorithm::d_adam, 4, 4, 60);
  cfg.problem.heterogeneity = 0.0;
  cfg.problem.sigma = 0.0;
  cfg.period = 2;
  const Topology topo = build_topology(cfg.topology.kind, 4,
                                       cfg.topology.weight_rule);
  const Problem problem = build_problem(cfg.problem, 4, cfg.seed);
  RunHooks hooks;
  hooks.on_state = [&](long, const std::vector<WorkerState>& ws) {
    for (int k = 1; k < 4; ++k)
      CHECK((ws[k].x - ws[0].x).squaredNorm() == 0.0);
  };
  const auto trace = run(cfg, problem, topo, &hooks);
  CHECK(trace.summary.max_consensus_err == 0.0);
}

TEST_CASE("gossip happens exactly at multiples of p") {
  // p = 3, T = 7: rounds fire at t+1 in {3, 6}.
  RunConfig cfg = quadratic_config(Algorithm::d_adam, 4, 3, 7);
  cfg.period = 3;
  const auto trace = run(cfg);
  REQUIRE(trace.rows.size() == 8);  // eval_every = 1 plus final state
  const std::uint64_t per_round = 4ull * 2ull * 32ull * 3ull;  // K*deg*32*d
  for (const auto& row : trace.rows) {
    const long expected_rounds = row.t < 3 ? 0 : (row.t < 6 ? 1 : 2);
    CHECK(row.comm_rounds_cum == expected_rounds);
    CHECK(row.comm_bits_cum == per_round * expected_rounds);
  }
  CHECK(trace.summary.comm_rounds_total == 7 / 3);
}

TEST_CASE("comm-round schedule is floor(T/p) across configurations") {
  for (const int p : {1, 2, 4, 5, 16})
    for (const long total : {1L, 7L, 16L, 33L}) {
      RunConfig cfg = quadratic_config(Algorithm::d_adam, 2, 2, total);
      cfg.period = p;
      cfg.eval_every = 1000;
      const auto trace = run(cfg);
      CHECK(trace.summary.comm_rounds_total == total / p);
    }
}

TEST_CASE("d_adam_vanilla equals d_adam at p=1") {
  RunConfig a = quadratic_config(Algorithm::d_adam, 4, 5, 120);
  a.period = 1;
  RunConfig b = quadratic_config(Algorithm::d_adam_vanilla, 4, 5, 120);
  b.period = 9;  // forced back to 1 by the algorithm definition
  const auto ta = run(a);
  const auto tb = run(b);
  REQUIRE(ta.rows.size() == tb.rows.size());
  for (std::size_t i = 0; i < ta.rows.size(); ++i) {
    CHECK(ta.rows[i].t == tb.rows[i].t);
    CHECK(ta.rows[i].loss == tb.rows[i].loss);
    CHECK(ta.rows[i].grad_norm_sq == tb.rows[i].grad_norm_sq);
    CHECK(ta.rows[i].consensus_err == tb.rows[i].consensus_err);
    CHECK(ta.rows[i].comm_bits_cum == tb.rows[i].comm_bits_cum);
  }
}

TEST_CASE("same seed reruns bit-identically") {
  const RunConfig cfg = quadratic_config(Algorithm::cd_adam, 5, 4, 90);
  const auto a = run(cfg);
  const auto b = run(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].loss == b.rows[i].loss);
    CHECK(a.rows[i].consensus_err == b.rows[i].consensus_err);
  }
  CHECK(a.summary.comm_bits_total == b.summary.comm_bits_total);
  CHECK(a.summary.empirical_G == b.summary.empirical_G);
}

TEST_CASE("first compressed exchange hand-trace on two workers") {
  // Hats start at zero, so the mixing term vanishes and the identity
  // compressor copies each iterate straight into the hats.
  const Topology topo =
      build_topology(TopologyKind::complete, 2, WeightRule::uniform_neighbor);
  const double a = 0.7, b = -0.3;
  std::vector<WorkerState> workers = init_workers(Vec::Zero(1), topo, true);
  workers[0].x = Vec::Constant(1, a);
  workers[1].x = Vec::Constant(1, b);

  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;
  ctx.use_momentum = false;
  ctx.gamma = 0.4;
  ctx.compressor = CompressorSpec{CompressorKind::identity, 0};
  // Zero gradients keep x_{t+1/2} = x_t.
  const std::vector<Vec> grads = {Vec::Zero(1), Vec::Zero(1)};
  step_cd_adam(workers, 0, ctx, grads);

  CHECK(workers[0].x[0] == doctest::Approx(a).epsilon(1e-15));
  CHECK(workers[1].x[0] == doctest::Approx(b).epsilon(1e-15));
  CHECK(workers[0].x_hat_self[0] == doctest::Approx(a).epsilon(1e-15));
  CHECK(workers[1].x_hat_self[0] == doctest::Approx(b).epsilon(1e-15));
  CHECK(workers[0].x_hat_neighbors.at(1)[0] ==
        doctest::Approx(b).epsilon(1e-15));
}

TEST_CASE("sign payload is d+32 bits per message on the 8-ring") {
  RunConfig cfg = quadratic_config(Algorithm::cd_adam, 8, 10, 32);
  cfg.period = 4;
  const auto trace = run(cfg);
  const std::uint64_t per_round = 8ull * 2ull * (10ull + 32ull);
  CHECK(trace.summary.comm_bits_total ==
        per_round * static_cast<std::uint64_t>(32 / 4));
}

TEST_CASE("compressed gossip alone averages exactly (eta = 0)") {
  // Pure consensus mode: distinct iterates, coherent hats, no gradient
  // motion. With the identity compressor the dispersion contracts to zero
  // (the exact-averaging sanity behind the hat-variable scheme).
  const Topology topo =
      build_topology(TopologyKind::ring, 8, WeightRule::uniform_neighbor);
  std::vector<WorkerState> workers = init_workers(Vec::Zero(3), topo, true);
  CounterRng rng(7, StreamPurpose::verification);
  for (auto& w : workers) w.x = rng.normal_vec(3);
  for (int k = 0; k < 8; ++k) {
    workers[k].x_hat_self = workers[k].x;
    for (int j : topo.neighbor_lists[k])
      workers[k].x_hat_neighbors[j] = workers[j].x;
  }
  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;
  ctx.use_momentum = false;
  ctx.gamma = 0.4;
  ctx.compressor = CompressorSpec{CompressorKind::identity, 0};
  ctx.hyper.eta = 1e-300;  // no effective local motion
  const std::vector<Vec> grads(8, Vec::Zero(3));

  const double initial = consensus_error(workers);
  const Vec mean_before = averaged_iterate(workers);
  for (long t = 0; t < 400; ++t) step_cd_adam(workers, t, ctx, grads);
  CHECK(consensus_error(workers) <= 1e-20 * initial);
  CHECK((averaged_iterate(workers) - mean_before).norm() < 1e-12);
}

TEST_CASE("averaged iterate follows the mean recursion for both algorithms") {
  // xbar_{t+1} = xbar_t - (eta/K) sum_k u_k ./ (sqrt(v_k) + tau): gossip and
  // the compressed exchange never move the mean.
  for (const auto alg : {Algorithm::d_adam, Algorithm::cd_adam}) {
    RunConfig cfg = quadratic_config(alg, 4, 3, 40);
    cfg.period = 2;
    const Topology topo = build_topology(cfg.topology.kind, 4,
                                         cfg.topology.weight_rule);
    const Problem problem = build_problem(cfg.problem, 4, cfg.seed);
    const bool momentum = resolved_use_momentum(cfg);

    std::vector<Vec> xbars;
    std::vector<std::vector<Vec>> grads_per_t;
    RunHooks hooks;
    hooks.on_state = [&](long, const std::vector<WorkerState>& ws) {
      xbars.push_back(averaged_iterate(ws));
    };
    hooks.on_gradient = [&](long t, int, const Vec& g) {
      if (static_cast<long>(grads_per_t.size()) <= t) grads_per_t.resize(t + 1);
      grads_per_t[t].push_back(g);
    };
    run(cfg, problem, topo, &hooks);

    std::vector<MomentState> moments(4, MomentState::zeros(3));
    for (long t = 0; t < cfg.total_iters; ++t) {
      Vec mean_step = Vec::Zero(3);
      for (int k = 0; k < 4; ++k) {
        auto out = adam_local_step(Vec::Zero(3), moments[k],
                                   grads_per_t[t][k], cfg.adam, momentum);
        mean_step += -out.x_half;  // displacement of the local step
        moments[k] = out.state;
      }
      const Vec expected = xbars[t] - mean_step / 4.0;
      CHECK((xbars[t + 1] - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("replica incoherence is detected as a protocol failure") {
  const Topology topo =
      build_topology(TopologyKind::ring, 4, WeightRule::uniform_neighbor);
  std::vector<WorkerState> workers = init_workers(Vec::Zero(2), topo, true);
  workers[0].x_hat_neighbors.at(1)[0] += 0.5;  // corrupt one replica
  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;
  ctx.use_momentum = false;
  ctx.gamma = 0.4;
  ctx.compressor = CompressorSpec{CompressorKind::identity, 0};
  const std::vector<Vec> grads(4, Vec::Ones(2));
  CHECK_THROWS_AS(step_cd_adam(workers, 0, ctx, grads), EngineError);
}

TEST_CASE("non-finite gradients abort with iteration and worker id") {
  const Topology topo =
      build_topology(TopologyKind::ring, 3, WeightRule::uniform_neighbor);
  std::vector<WorkerState> workers = init_workers(Vec::Zero(2), topo, false);
  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;
  ctx.use_momentum = true;
  std::vector<Vec> grads(3, Vec::Ones(2));
  grads[1][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(step_d_adam(workers, 5, ctx, grads),
                       doctest::Contains("worker 1"), Error);
}

TEST_CASE("d_psgd on a noiseless strongly convex quadratic converges") {
  // Identical workers: fixed-step decentralized SGD reduces to plain
  // gradient descent on the averaged objective (heterogeneous data would add
  // a step-size-dependent disagreement floor).
  RunConfig cfg = quadratic_config(Algorithm::d_psgd, 4, 4, 800);
  cfg.problem.sigma = 0.0;
  cfg.problem.heterogeneity = 0.0;
  cfg.period = 1;
  const Problem problem = build_problem(cfg.problem, 4, cfg.seed);
  cfg.adam.eta = 0.9 / problem.smoothness();
  const Topology topo = build_topology(cfg.topology.kind, 4,
                                       cfg.topology.weight_rule);
  const auto trace = run(cfg, problem, topo);
  // Monotone nonincreasing loss after burn-in, gradient driven to zero.
  for (std::size_t i = 20; i + 1 < trace.rows.size(); ++i)
    CHECK(trace.rows[i + 1].loss <= trace.rows[i].loss + 1e-12);
  CHECK(std::sqrt(trace.summary.final_grad_norm_sq) <= 1e-6);
  REQUIRE(problem.f_star().has_value());
  CHECK(trace.summary.final_loss ==
        doctest::Approx(*problem.f_star()).epsilon(1e-6));
}

TEST_CASE("config validation rejects inconsistent setups") {
  RunConfig cfg = quadratic_config(Algorithm::cd_adam, 4, 4, 10);
  cfg.compressor.reset();
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("compressor"),
                       ConfigError);
  cfg = quadratic_config(Algorithm::d_adam, 4, 4, 10);
  cfg.period = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = quadratic_config(Algorithm::cd_adam, 4, 4, 10);
  cfg.gamma.value = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("gamma=auto resolves to the stability formula value") {
  RunConfig cfg = quadratic_config(Algorithm::cd_adam, 8, 16, 8);
  cfg.gamma.auto_mode = true;
  const auto trace = run(cfg);
  const Topology topo =
      build_topology(TopologyKind::ring, 8, WeightRule::uniform_neighbor);
  const double delta =
      cfg.compressor->guaranteed_delta(16);  // sign: 1/d
  const double beta = mixing_beta(topo.weights);
  const double rho = topo.spectral_gap;
  const double expected =
      rho * delta / (16.0 * rho + rho * rho + 4.0 * beta * beta +
                     2.0 * rho * beta * beta - 8.0 * rho * delta);
  CHECK(trace.summary.resolved_gamma ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(trace.summary.resolved_gamma > 0.0);
  CHECK(trace.summary.resolved_gamma < 1.0);
}

TEST_CASE("empirical G honors the clip bound") {
  RunConfig cfg = quadratic_config(Algorithm::d_adam, 4, 4, 50);
  cfg.problem.clip_G = 0.5;
  const auto trace = run(cfg);
  CHECK(trace.summary.empirical_G <= 0.5);
  CHECK(trace.summary.empirical_G > 0.0);
}

TEST_CASE("momentum flag defaults depend on the algorithm") {
  RunConfig cfg = quadratic_config(Algorithm::d_adam, 2, 2, 4);
  CHECK(resolved_use_momentum(cfg));
  cfg = quadratic_config(Algorithm::cd_adam, 2, 2, 4);
  CHECK(!resolved_use_momentum(cfg));
  cfg.use_momentum_in_step = true;
  CHECK(resolved_use_momentum(cfg));
}
