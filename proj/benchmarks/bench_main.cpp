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

#include <benchmark/benchmark.h>

#include "decadam/compression.hpp"
#include "decadam/engine.hpp"
#include "decadam/optimizer.hpp"
#include "decadam/topology.hpp"

namespace {

using namespace decadam;

void BM_AdamLocalStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  CounterRng rng(1, StreamPurpose::verification);
  const Vec x = rng.normal_vec(dim);
  const Vec g = rng.normal_vec(dim);
  MomentState moments = MomentState::zeros(dim);
  const AdamHyper hyper;
  for (auto _ : state) {
    auto out = adam_local_step(x, moments, g, hyper, true);
    benchmark::DoNotOptimize(out.x_half.data());
    moments = std::move(out.state);
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_AdamLocalStep)->Arg(1 << 8)->Arg(1 << 12)->Arg(1 << 16);

void BM_CompressSign(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  CounterRng rng(2, StreamPurpose::verification);
  const Vec x = rng.normal_vec(dim);
  const CompressorSpec spec{CompressorKind::scaled_sign, 0};
  for (auto _ : state) {
    auto res = compress(spec, x, rng);
    benchmark::DoNotOptimize(res.q.data());
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_CompressSign)->Arg(1 << 10)->Arg(1 << 16);

void BM_CompressTopK(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  CounterRng rng(3, StreamPurpose::verification);
  const Vec x = rng.normal_vec(dim);
  const CompressorSpec spec{CompressorKind::top_k, dim / 16};
  for (auto _ : state) {
    auto res = compress(spec, x, rng);
    benchmark::DoNotOptimize(res.q.data());
  }
  state.SetItemsProcessed(state.iterations() * dim);
}
BENCHMARK(BM_CompressTopK)->Arg(1 << 10)->Arg(1 << 16);

void BM_GossipRound(benchmark::State& state) {
  const int k_workers = static_cast<int>(state.range(0));
  const int dim = 1024;
  const auto topo =
      build_topology(TopologyKind::ring, k_workers, WeightRule::metropolis);
  CounterRng rng(4, StreamPurpose::verification);
  std::vector<WorkerState> workers = init_workers(Vec::Zero(dim), topo, false);
  for (auto& w : workers) w.x = rng.normal_vec(dim);
  std::vector<Vec> grads(k_workers);
  for (auto& g : grads) g = rng.normal_vec(dim);
  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;  // every step is a communication round
  ctx.use_momentum = true;
  long t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_d_adam(workers, t++, ctx, grads));
  }
  state.SetItemsProcessed(state.iterations() * k_workers * dim);
}
BENCHMARK(BM_GossipRound)->Arg(8)->Arg(32);

void BM_CompressedExchange(benchmark::State& state) {
  const int k_workers = static_cast<int>(state.range(0));
  const int dim = 1024;
  const auto topo = build_topology(TopologyKind::ring, k_workers,
                                   WeightRule::uniform_neighbor);
  CounterRng rng(5, StreamPurpose::verification);
  std::vector<WorkerState> workers = init_workers(Vec::Zero(dim), topo, true);
  std::vector<Vec> grads(k_workers);
  for (auto& g : grads) g = rng.normal_vec(dim);
  StepContext ctx;
  ctx.topology = &topo;
  ctx.period = 1;
  ctx.use_momentum = false;
  ctx.gamma = 0.4;
  ctx.compressor = CompressorSpec{CompressorKind::scaled_sign, 0};
  long t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(step_cd_adam(workers, t++, ctx, grads));
  }
  state.SetItemsProcessed(state.iterations() * k_workers * dim);
}
BENCHMARK(BM_CompressedExchange)->Arg(8)->Arg(32);

void BM_SpectralGap(benchmark::State& state) {
  const int k_workers = static_cast<int>(state.range(0));
  const auto topo = build_topology(TopologyKind::grid2d, k_workers,
                                   WeightRule::metropolis);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_gap(topo.weights));
  }
}
BENCHMARK(BM_SpectralGap)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
