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

#include "decadam/analysis.hpp"
#include "decadam/errors.hpp"

using namespace decadam;

namespace {

RunConfig bound_config(Algorithm alg) {
  RunConfig cfg;
  cfg.algorithm = alg;
  cfg.topology.kind = TopologyKind::ring;
  cfg.topology.num_workers = 8;
  cfg.problem.kind = ProblemKind::quadratic;
  cfg.problem.dim = 8;
  cfg.problem.heterogeneity = 0.5;
  cfg.problem.sigma = 0.1;
  cfg.problem.clip_G = 1.0;
  cfg.total_iters = 200;
  cfg.eval_every = 50;
  cfg.seed = 41;
  if (alg == Algorithm::cd_adam)
    cfg.compressor = CompressorSpec{CompressorKind::scaled_sign, 0};
  return cfg;
}

}  // namespace

TEST_CASE("gossip bound value at the unit point") {
  // rho = 1, d = eta = p = G = K = tau = 1: (1 + 4) * 2 = 10.
  CHECK(gossip_consensus_bound(1, 1, 1, 1, 1, 1, 1) == doctest::Approx(10.0));
  CHECK(gossip_consensus_bound(1, 0.0, 1, 1, 1, 1, 1) == 0.0);  // eta = 0
}

TEST_CASE("gossip bound on the 8-ring matches independent arithmetic") {
  const double rho = (2.0 - std::sqrt(2.0)) / 3.0;
  const double d = 4, eta = 0.001, p = 4, g = 1, k = 8, tau = 0.1;
  // Different association order than the implementation.
  const double expected =
      ((2.0 * d * k) * ((eta * p * g / tau) * (eta * p * g / tau))) *
      (1.0 + 4.0 / rho / rho);
  CHECK(gossip_consensus_bound(d, eta, p, g, k, tau, rho) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("compressed bound value with rho = delta = 1") {
  // alpha = 1/82, bound = 8 d eta^2 p^2 G^2 K / tau^2 * (1 + 2*82^2).
  CHECK(compressed_contraction_alpha(1.0, 1.0) == doctest::Approx(1.0 / 82.0));
  const double base = 8.0 * 2 * 0.01 * 9 * 4 * 3 / 0.25;
  CHECK(compressed_consensus_bound(2, 0.1, 3, 2, 3, 0.5, 1.0, 1.0) ==
        doctest::Approx(base * (1.0 + 2.0 * 82.0 * 82.0)).epsilon(1e-12));
  CHECK(compressed_consensus_bound(2, 0.0, 3, 2, 3, 0.5, 1.0, 1.0) == 0.0);
}

TEST_CASE("bounds are monotone in each constant") {
  const double b0 = gossip_consensus_bound(4, 0.01, 2, 1, 8, 0.2, 0.5);
  CHECK(gossip_consensus_bound(8, 0.01, 2, 1, 8, 0.2, 0.5) > b0);   // d up
  CHECK(gossip_consensus_bound(4, 0.02, 2, 1, 8, 0.2, 0.5) > b0);   // eta up
  CHECK(gossip_consensus_bound(4, 0.01, 4, 1, 8, 0.2, 0.5) > b0);   // p up
  CHECK(gossip_consensus_bound(4, 0.01, 2, 2, 8, 0.2, 0.5) > b0);   // G up
  CHECK(gossip_consensus_bound(4, 0.01, 2, 1, 16, 0.2, 0.5) > b0);  // K up
  CHECK(gossip_consensus_bound(4, 0.01, 2, 1, 8, 0.4, 0.5) < b0);   // tau up
  CHECK(gossip_consensus_bound(4, 0.01, 2, 1, 8, 0.2, 0.9) < b0);   // rho up
  // Smaller delta means a strictly larger compressed bound.
  double prev = 0.0;
  for (const double delta : {1.0, 0.5, 0.25, 0.125, 1.0 / 16}) {
    const double b = compressed_consensus_bound(4, 0.01, 2, 1, 8, 0.2, 0.5, delta);
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("invalid constants are rejected") {
  CHECK_THROWS_AS(gossip_consensus_bound(4, 0.01, 2, 1, 8, 0.2, 0.0), ValidationError);
  CHECK_THROWS_AS(gossip_consensus_bound(4, 0.01, 2, 1, 8, 0.2, 1.5), ValidationError);
  CHECK_THROWS_AS(compressed_contraction_alpha(0.5, 0.0), ValidationError);
  CHECK_THROWS_AS(compressed_consensus_bound(0, 0.01, 2, 1, 8, 0.2, 0.5, 0.5),
                  ValidationError);
}

TEST_CASE("consensus bound reports for matching algorithms") {
  // Identical noiseless workers: empirical consensus 0 beats any bound.
  RunConfig cfg = bound_config(Algorithm::d_adam);
  cfg.problem.sigma = 0.0;
  cfg.problem.heterogeneity = 0.0;
  const auto trace = run(cfg);
  const auto report =
      check_consensus_bound(trace.summary, cfg, ConsensusBoundKind::gossip);
  CHECK(report.satisfied);
  CHECK(report.empirical_value == 0.0);
  CHECK(report.inputs.G == 1.0);  // clip bound, not the empirical max
  CHECK(report.bound_name == "gossip_consensus");
}

TEST_CASE("algorithm/bound mismatch is an error") {
  RunConfig cfg = bound_config(Algorithm::d_adam);
  const auto trace = run(cfg);
  CHECK_THROWS_AS(
      check_consensus_bound(trace.summary, cfg, ConsensusBoundKind::compressed),
      ValidationError);
  RunConfig cd = bound_config(Algorithm::cd_adam);
  const auto cd_trace = run(cd);
  CHECK_THROWS_AS(
      check_consensus_bound(cd_trace.summary, cd, ConsensusBoundKind::gossip),
      ValidationError);
  CHECK(check_consensus_bound(cd_trace.summary, cd, ConsensusBoundKind::compressed)
            .satisfied);
}

TEST_CASE("consensus bounds hold pathwise on a small clipped sweep") {
  for (const auto alg : {Algorithm::d_adam, Algorithm::cd_adam}) {
    for (const int p : {1, 4, 16}) {
      for (std::uint64_t seed = 50; seed < 55; ++seed) {
        RunConfig cfg = bound_config(alg);
        cfg.period = p;
        cfg.seed = seed;
        const auto trace = run(cfg);
        const auto report = check_consensus_bound(
            trace.summary, cfg,
            alg == Algorithm::cd_adam ? ConsensusBoundKind::compressed
                                      : ConsensusBoundKind::gossip);
        CHECK(report.satisfied);
        CHECK(report.empirical_value >= 0.0);
      }
    }
  }
}

TEST_CASE("deterministic identical workers make the curve flat in K") {
  // No noise and no heterogeneity: every worker replays the same
  // trajectory, so the averaged-iterate metric cannot depend on K once the
  // step sizes are held fixed.
  RunConfig base = bound_config(Algorithm::d_adam);
  base.problem.sigma = 0.0;
  base.problem.heterogeneity = 0.0;
  base.problem.clip_G.reset();
  base.total_iters = 100;
  double reference = -1.0;
  for (const int k : {1, 2, 4}) {
    base.topology.num_workers = k;
    const auto trace = run(base);
    if (reference < 0)
      reference = trace.summary.avg_grad_norm_sq;
    else
      CHECK(trace.summary.avg_grad_norm_sq ==
            doctest::Approx(reference).epsilon(1e-12));
  }
}

TEST_CASE("speedup_curve reduces to the sequential run at K = 1") {
  RunConfig base = bound_config(Algorithm::d_adam);
  base.problem.heterogeneity = 0.0;
  base.problem.clip_G.reset();
  base.period = 4;
  const long total = 150;
  const auto points = speedup_curve(base, {1}, total, 3, 1);
  REQUIRE(points.size() == 1);
  REQUIRE(points[0].per_seed.size() == 3);
  for (int s = 0; s < 3; ++s) {
    RunConfig cfg = base;
    cfg.topology.num_workers = 1;
    cfg.total_iters = total;
    cfg.seed = base.seed + s;
    cfg.adam.eta = 0.1 * std::sqrt(1.0) / std::sqrt(double(total));
    const Problem problem = build_problem(cfg.problem, 1, cfg.seed);
    cfg.adam.tau = std::min(0.5, 1.0 / problem.smoothness());
    const auto trace = run(cfg);
    CHECK(points[0].per_seed[s] ==
          doctest::Approx(trace.summary.avg_grad_norm_sq).epsilon(1e-12));
  }
}

TEST_CASE("nonincreasing_within_se tolerates small noise bumps") {
  std::vector<SpeedupPoint> pts(3);
  pts[0] = {1, 1.0, 0.05, {}};
  pts[1] = {2, 1.02, 0.05, {}};  // within 2 pooled SEs
  pts[2] = {4, 0.7, 0.05, {}};
  CHECK(nonincreasing_within_se(pts));
  pts[1].mean_avg_grad_norm_sq = 1.5;  // clearly increasing
  CHECK(!nonincreasing_within_se(pts));
}

TEST_CASE("period sweep halves rounds as p doubles") {
  RunConfig base = bound_config(Algorithm::d_adam);
  base.problem.clip_G.reset();
  const long total = 160;
  const auto points = period_sensitivity(base, {1, 2, 4}, total, 2, 1);
  REQUIRE(points.size() == 3);
  CHECK(points[0].comm_rounds == 160);
  CHECK(points[1].comm_rounds == 80);
  CHECK(points[2].comm_rounds == 40);
  // Bits scale exactly with the round count.
  CHECK(points[0].comm_bits == 2 * points[1].comm_bits);
  CHECK(points[1].comm_bits == 2 * points[2].comm_bits);
  for (const auto& pt : points) CHECK(std::isfinite(pt.final_loss_mean));
}
