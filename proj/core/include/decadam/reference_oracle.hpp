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

#include "decadam/compression.hpp"
#include "decadam/optimizer.hpp"
#include "decadam/types.hpp"

namespace decadam {

// Independent matrix-form implementation of both dynamics, used to
// cross-validate the node-level engine. Gradients are injected, not
// generated, so both implementations consume one recorded stream; this is
// the trusted slow path (single-threaded, dense matrices, no reuse of the
// engine's update code). Reductions run in ascending worker order, matching
// the engine.

struct MatrixIterate {
  Mat x;       // d x K stacked iterates
  Mat m;       // first moments
  Mat v;       // second moments
  Mat x_hat;   // compressed variant's hat-variables (d x K)

  static MatrixIterate init(const Vec& x0, int num_workers, bool with_hats);

  /// Columns replicated from the row-wise mean of x.
  Mat xbar() const;
};

/// One step of the full-precision dynamics:
///   X_{t+1/2} = X_t - eta * Delta_t, X_{t+1} = X_{t+1/2} P,
/// where P is the mixing matrix on communication rounds and the identity
/// otherwise, and Delta_t stacks the per-worker adaptive directions.
void oracle_step_dadam(MatrixIterate& state, const Mat& gradients, long t,
                       const AdamHyper& hyper, const Mat& weights, int period,
                       bool use_momentum_in_step);

/// One step of the compressed dynamics; on communication rounds
///   X_{t+1} = X_{t+1/2} + gamma * Xhat (W - I),
///   Xhat'   = Xhat + Q(X_{t+1} - Xhat)   (column-wise Q),
/// otherwise the hat matrix is carried unchanged. random_k columns draw from
/// the same per-(worker, round) streams as the engine.
void oracle_step_cdadam(MatrixIterate& state, const Mat& gradients, long t,
                        const AdamHyper& hyper, const Mat& weights, int period,
                        double gamma, const CompressorSpec& compressor,
                        std::uint64_t seed);

}  // namespace decadam
