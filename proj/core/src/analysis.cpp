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

#include "decadam/analysis.hpp"

#include <cmath>

#include "decadam/parallel.hpp"

namespace decadam {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

BoundReport check_consensus_bound(const RunSummary& summary,
                                  const RunConfig& cfg, ConsensusBoundKind which) {
  const bool adam_family = cfg.algorithm == Algorithm::d_adam ||
                           cfg.algorithm == Algorithm::d_adam_vanilla;
  if (which == ConsensusBoundKind::gossip && !adam_family)
    throw ValidationError("the gossip consensus bound applies to the full-precision algorithm");
  if (which == ConsensusBoundKind::compressed && cfg.algorithm != Algorithm::cd_adam)
    throw ValidationError("the compressed consensus bound applies to the compressed algorithm");

  BoundReport report;
  BoundInputs& in = report.inputs;
  in.d = cfg.problem.dim;
  in.eta = cfg.adam.eta;
  in.p = resolved_period(cfg);
  in.G = cfg.problem.clip_G ? *cfg.problem.clip_G : summary.empirical_G;
  in.K = cfg.topology.num_workers;
  in.tau = cfg.adam.tau;
  in.rho = summary.topology_rho;

  if (which == ConsensusBoundKind::gossip) {
    report.bound_name = "gossip_consensus";
    report.theoretical_value =
        gossip_consensus_bound(in.d, in.eta, in.p, in.G, in.K, in.tau, in.rho);
  } else {
    report.bound_name = "compressed_consensus";
    in.delta = cfg.compressor->guaranteed_delta(cfg.problem.dim);
    in.alpha = compressed_contraction_alpha(in.rho, in.delta);
    report.theoretical_value = compressed_consensus_bound(in.d, in.eta, in.p, in.G, in.K,
                                            in.tau, in.rho, in.delta);
  }
  report.empirical_value = summary.max_consensus_err;
  report.satisfied =
      report.empirical_value <= report.theoretical_value * (1.0 + 1e-9);
  return report;
}

std::vector<SpeedupPoint> speedup_curve(const RunConfig& base,
                                        const std::vector<int>& k_list,
                                        long total_iters, int n_seeds,
                                        int jobs) {
  std::vector<SpeedupPoint> points(k_list.size());
  struct Job {
    int point;
    int seed_index;
  };
  std::vector<Job> todo;
  std::vector<std::vector<double>> results(k_list.size());
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    results[i].assign(n_seeds, 0.0);
    for (int s = 0; s < n_seeds; ++s)
      todo.push_back({static_cast<int>(i), s});
  }

  parallel_for(static_cast<int>(todo.size()), jobs, [&](int idx) {
    const auto [point, seed_index] = todo[idx];
    RunConfig cfg = base;
    cfg.topology.num_workers = k_list[point];
    cfg.total_iters = total_iters;
    cfg.seed = base.seed + static_cast<std::uint64_t>(seed_index);
    const double k = static_cast<double>(k_list[point]);
    cfg.adam.eta = 0.1 * std::sqrt(k) / std::sqrt(static_cast<double>(total_iters));
    const Problem problem =
        build_problem(cfg.problem, cfg.topology.num_workers, cfg.seed);
    cfg.adam.tau = std::min(0.5, std::sqrt(k) / problem.smoothness());
    const Topology topo = build_topology(cfg.topology.kind,
                                         cfg.topology.num_workers,
                                         cfg.topology.weight_rule);
    const RunTrace trace = run(cfg, problem, topo);
    results[point][seed_index] = trace.summary.avg_grad_norm_sq;
  });

  for (std::size_t i = 0; i < k_list.size(); ++i) {
    const auto stats = mean_and_se(results[i]);
    points[i].num_workers = k_list[i];
    points[i].mean_avg_grad_norm_sq = stats.mean;
    points[i].standard_error = stats.se;
    points[i].per_seed = results[i];
  }
  return points;
}

bool nonincreasing_within_se(const std::vector<SpeedupPoint>& points,
                             double z) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double pooled = std::sqrt(
        points[i].standard_error * points[i].standard_error +
        points[i - 1].standard_error * points[i - 1].standard_error);
    if (points[i].mean_avg_grad_norm_sq >
        points[i - 1].mean_avg_grad_norm_sq + z * pooled)
      return false;
  }
  return true;
}

std::vector<PeriodPoint> period_sensitivity(const RunConfig& base,
                                            const std::vector<int>& p_list,
                                            long total_iters, int n_seeds,
                                            int jobs) {
  std::vector<PeriodPoint> points(p_list.size());
  struct Job {
    int point;
    int seed_index;
  };
  std::vector<Job> todo;
  std::vector<std::vector<double>> losses(p_list.size());
  std::vector<std::uint64_t> bits(p_list.size(), 0);
  std::vector<long> rounds(p_list.size(), 0);
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    losses[i].assign(n_seeds, 0.0);
    for (int s = 0; s < n_seeds; ++s)
      todo.push_back({static_cast<int>(i), s});
  }

  parallel_for(static_cast<int>(todo.size()), jobs, [&](int idx) {
    const auto [point, seed_index] = todo[idx];
    RunConfig cfg = base;
    cfg.period = p_list[point];
    cfg.total_iters = total_iters;
    cfg.seed = base.seed + static_cast<std::uint64_t>(seed_index);
    const RunTrace trace = run(cfg);
    losses[point][seed_index] = trace.summary.final_loss;
    if (seed_index == 0) {
      bits[point] = trace.summary.comm_bits_total;
      rounds[point] = trace.summary.comm_rounds_total;
    }
  });

  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const auto stats = mean_and_se(losses[i]);
    points[i].period = p_list[i];
    points[i].final_loss_mean = stats.mean;
    points[i].final_loss_se = stats.se;
    points[i].comm_bits = bits[i];
    points[i].comm_rounds = rounds[i];
  }
  return points;
}

}  // namespace decadam
