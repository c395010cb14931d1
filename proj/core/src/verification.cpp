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

#include "decadam/verification.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "decadam/errors.hpp"
#include "decadam/reference_oracle.hpp"

namespace decadam {

namespace {

/// Closed-form spectral gap of the uniform-weight ring: eigenvalues are
/// (1 + 2 cos(2 pi j / K)) / 3.
double ring_gap_circulant(int k) {
  double second = 0.0;
  for (int j = 1; j < k; ++j) {
    const double lambda =
        (1.0 + 2.0 * std::cos(2.0 * std::numbers::pi * j / k)) / 3.0;
    second = std::max(second, std::abs(lambda));
  }
  return 1.0 - second;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  os << to_string(cfg.algorithm) << " " << to_string(cfg.topology.kind)
     << " K=" << cfg.topology.num_workers << " d=" << cfg.problem.dim
     << " p=" << cfg.period;
  if (cfg.compressor)
    os << " Q=" << to_string(cfg.compressor->kind) << "(k=" << cfg.compressor->k
       << ")";
  return os.str();
}

}  // namespace

Mat random_doubly_stochastic(int num_workers, CounterRng& rng) {
  Mat m(num_workers, num_workers);
  for (int i = 0; i < num_workers; ++i)
    for (int j = 0; j < num_workers; ++j) m(i, j) = 0.1 + rng.uniform01();
  m = ((m + m.transpose()) / 2.0).eval();
  // Symmetric Sinkhorn balancing: m <- D m D with D = diag(1/sqrt(rowsum)).
  for (int iter = 0; iter < 2000; ++iter) {
    const Vec r = m.rowwise().sum();
    double worst = 0.0;
    for (int i = 0; i < num_workers; ++i)
      worst = std::max(worst, std::abs(r[i] - 1.0));
    if (worst < 1e-13) break;
    const Vec d = r.cwiseSqrt().cwiseInverse();
    m = (d.asDiagonal() * m * d.asDiagonal()).eval();
    m = ((m + m.transpose()) / 2.0).eval();  // keep symmetry exact
  }
  return m;
}

SuiteResult verify_mixing_suite(std::uint64_t seed, int n_random) {
  SuiteResult result;
  result.name = "mixing";
  int checked = 0;

  auto check_topology = [&](const Topology& topo, const std::string& label) {
    ++checked;
    try {
      validate_mixing_matrix(topo.weights, 1e-10);
    } catch (const Error& e) {
      result.failures.push_back(label + ": " + e.what());
      return;
    }
    for (int i = 0; i < topo.num_workers; ++i)
      for (int j = i + 1; j < topo.num_workers; ++j)
        if (topo.weights(i, j) != topo.weights(j, i)) {
          result.failures.push_back(label + ": asymmetric entry");
          return;
        }
    if (!check_spectral_deflation(topo.weights))
      result.failures.push_back(label + ": spectral deflation bound violated");
  };

  for (const auto kind :
       {TopologyKind::ring, TopologyKind::complete, TopologyKind::grid2d,
        TopologyKind::star_regularized}) {
    for (const auto rule :
         {WeightRule::uniform_neighbor, WeightRule::metropolis}) {
      for (int k = 2; k <= 16; ++k) {
        const auto topo = build_topology(kind, k, rule);
        check_topology(topo, to_string(kind) + "/" + to_string(rule) +
                                 "/K=" + std::to_string(k));
      }
    }
  }

  for (int k = 3; k <= 32; ++k) {
    const auto topo =
        build_topology(TopologyKind::ring, k, WeightRule::uniform_neighbor);
    const double expected = ring_gap_circulant(k);
    if (std::abs(topo.spectral_gap - expected) > 1e-10)
      result.failures.push_back("ring K=" + std::to_string(k) +
                                ": gap deviates from circulant value");
  }

  CounterRng rng(seed, StreamPurpose::verification, 7);
  for (int i = 0; i < n_random; ++i) {
    const int k = 2 + static_cast<int>(rng.uniform_below(11));
    const Mat w = random_doubly_stochastic(k, rng);
    try {
      validate_mixing_matrix(w, 1e-10);
      if (!check_spectral_deflation(w))
        result.failures.push_back("sinkhorn #" + std::to_string(i) +
                                  ": deflation bound violated");
    } catch (const Error& e) {
      result.failures.push_back("sinkhorn #" + std::to_string(i) + ": " +
                                e.what());
    }
    ++checked;
  }

  result.detail = std::to_string(checked) + " matrices checked";
  result.passed = result.failures.empty();
  return result;
}

SuiteResult verify_contraction_suite(std::uint64_t seed, int n_trials,
                                     int dim) {
  SuiteResult result;
  result.name = "contraction";
  const std::vector<CompressorSpec> specs = {
      {CompressorKind::identity, 0},
      {CompressorKind::scaled_sign, 0},
      {CompressorKind::top_k, std::max(1, dim / 4)},
      {CompressorKind::random_k, std::max(1, dim / 4)},
  };
  std::ostringstream detail;
  for (const auto& spec : specs) {
    const auto report = verify_contraction(spec, n_trials, dim, seed);
    detail << to_string(spec.kind) << " max_ratio=" << report.max_ratio
           << "; ";
    if (!report.satisfied)
      result.failures.push_back(
          to_string(spec.kind) + ": " + std::to_string(report.violations) +
          " violation(s), max ratio " + std::to_string(report.max_ratio) +
          " vs threshold " + std::to_string(report.threshold));
  }
  result.detail = detail.str();
  result.passed = result.failures.empty();
  return result;
}

double run_equivalence_case(const RunConfig& cfg) {
  const Topology topo = build_topology(cfg.topology.kind,
                                       cfg.topology.num_workers,
                                       cfg.topology.weight_rule);
  const Problem problem = build_problem(cfg.problem, cfg.topology.num_workers,
                                        cfg.seed);
  const int dim = cfg.problem.dim;
  const int k_workers = cfg.topology.num_workers;
  const long total = cfg.total_iters;

  std::vector<Mat> states;  // X_t for t = 0..T
  std::vector<Mat> grads;   // one d x K block per iteration
  states.reserve(total + 1);
  grads.assign(total, Mat::Zero(dim, k_workers));
  RunHooks hooks;
  hooks.on_state = [&](long, const std::vector<WorkerState>& workers) {
    Mat x(dim, k_workers);
    for (int k = 0; k < k_workers; ++k) x.col(k) = workers[k].x;
    states.push_back(std::move(x));
  };
  hooks.on_gradient = [&](long t, int k, const Vec& g) {
    grads[t].col(k) = g;
  };
  run(cfg, problem, topo, &hooks);

  // Replay the recorded stream through the matrix-form reference.
  const bool cd = cfg.algorithm == Algorithm::cd_adam;
  MatrixIterate state = MatrixIterate::init(Vec::Zero(dim), k_workers, cd);
  const int period = resolved_period(cfg);
  const bool momentum = resolved_use_momentum(cfg);
  double worst = 0.0;
  auto compare = [&](const Mat& engine_x, const Mat& oracle_x) {
    for (int k = 0; k < k_workers; ++k)
      for (int j = 0; j < dim; ++j)
        worst = std::max(worst,
                         rel_discrepancy(engine_x(j, k), oracle_x(j, k)));
  };
  compare(states[0], state.x);
  for (long t = 0; t < total; ++t) {
    if (cd) {
      oracle_step_cdadam(state, grads[t], t, cfg.adam, topo.weights, period,
                         cfg.gamma.value, *cfg.compressor, cfg.seed);
    } else if (cfg.algorithm == Algorithm::d_psgd) {
      // Matrix form of the constant-rate baseline.
      const Mat half = state.x - cfg.adam.eta * grads[t];
      if ((t + 1) % period == 0) {
        Mat mixed = Mat::Zero(dim, k_workers);
        for (int dst = 0; dst < k_workers; ++dst)
          for (int src = 0; src < k_workers; ++src) {
            const double w = topo.weights(src, dst);
            if (w != 0.0) mixed.col(dst) += w * half.col(src);
          }
        state.x = std::move(mixed);
      } else {
        state.x = half;
      }
    } else {
      oracle_step_dadam(state, grads[t], t, cfg.adam, topo.weights, period,
                        momentum);
    }
    compare(states[t + 1], state.x);
  }
  return worst;
}

SuiteResult verify_equivalence_suite(std::uint64_t seed, int n_configs,
                                     long steps, double tol) {
  SuiteResult result;
  result.name = "oracle-equivalence";
  CounterRng rng(seed, StreamPurpose::verification, 11);
  const TopologyKind kinds[] = {TopologyKind::ring, TopologyKind::complete,
                                TopologyKind::grid2d,
                                TopologyKind::star_regularized};
  const CompressorKind q_kinds[] = {
      CompressorKind::identity, CompressorKind::scaled_sign,
      CompressorKind::top_k, CompressorKind::random_k};
  const int periods[] = {1, 2, 4};

  double worst = 0.0;
  for (int i = 0; i < n_configs; ++i) {
    RunConfig cfg;
    cfg.algorithm = (i % 2 == 0) ? Algorithm::d_adam : Algorithm::cd_adam;
    if (i % 7 == 3) cfg.algorithm = Algorithm::d_psgd;
    cfg.topology.kind = kinds[rng.uniform_below(4)];
    cfg.topology.num_workers = 2 + static_cast<int>(rng.uniform_below(7));
    cfg.problem.dim = 2 + static_cast<int>(rng.uniform_below(31));
    cfg.problem.heterogeneity = 0.7;
    cfg.problem.sigma = 0.1;
    cfg.period = periods[rng.uniform_below(3)];
    cfg.total_iters = steps;
    cfg.seed = seed + static_cast<std::uint64_t>(i);
    cfg.eval_every = static_cast<int>(steps);
    if (cfg.algorithm == Algorithm::cd_adam) {
      CompressorSpec spec;
      spec.kind = q_kinds[rng.uniform_below(4)];
      spec.k = 1 + static_cast<int>(rng.uniform_below(cfg.problem.dim));
      cfg.compressor = spec;
      cfg.gamma.value = 0.4;
    }
    const double discrepancy = run_equivalence_case(cfg);
    worst = std::max(worst, discrepancy);
    if (!(discrepancy <= tol))
      result.failures.push_back(describe(cfg) + ": max discrepancy " +
                                std::to_string(discrepancy));
  }
  std::ostringstream detail;
  detail << n_configs << " configs, worst discrepancy " << worst;
  result.detail = detail.str();
  result.passed = result.failures.empty();
  return result;
}

}  // namespace decadam
