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

#include "decadam/reference_oracle.hpp"

#include <cmath>

#include "decadam/errors.hpp"

namespace decadam {

namespace {

bool is_comm_round(long t, int period) { return (t + 1) % period == 0; }

/// Moment recursions and adaptive directions, written against whole
/// matrices rather than per-worker vectors.
Mat adaptive_directions(MatrixIterate& state, const Mat& gradients,
                        const AdamHyper& hyper, bool use_momentum) {
  if (gradients.rows() != state.x.rows() ||
      gradients.cols() != state.x.cols())
    throw ValidationError("gradient matrix dimension mismatch");
  state.m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * gradients;
  state.v = hyper.beta2 * state.v +
            (1.0 - hyper.beta2) * gradients.cwiseProduct(gradients);
  const Mat& numerator = use_momentum ? state.m : gradients;
  return numerator.cwiseQuotient(
      (state.v.array().sqrt() + hyper.tau).matrix());
}

/// Right-multiplication by P, accumulated in ascending source index with
/// zero entries skipped (same reduction order as the engine's gossip).
Mat apply_mixing(const Mat& x, const Mat& p) {
  const Eigen::Index k = x.cols();
  Mat out = Mat::Zero(x.rows(), k);
  for (Eigen::Index dst = 0; dst < k; ++dst) {
    for (Eigen::Index src = 0; src < k; ++src) {
      const double w = p(src, dst);
      if (w != 0.0) out.col(dst) += w * x.col(src);
    }
  }
  return out;
}

}  // namespace

MatrixIterate MatrixIterate::init(const Vec& x0, int num_workers,
                                  bool with_hats) {
  MatrixIterate s;
  const int d = static_cast<int>(x0.size());
  s.x = x0.replicate(1, num_workers);
  s.m = Mat::Zero(d, num_workers);
  s.v = Mat::Zero(d, num_workers);
  s.x_hat = with_hats ? s.x : Mat();
  return s;
}

Mat MatrixIterate::xbar() const {
  const Vec mean = x.rowwise().sum() / static_cast<double>(x.cols());
  return mean.replicate(1, x.cols());
}

void oracle_step_dadam(MatrixIterate& state, const Mat& gradients, long t,
                       const AdamHyper& hyper, const Mat& weights, int period,
                       bool use_momentum_in_step) {
  const Mat delta =
      adaptive_directions(state, gradients, hyper, use_momentum_in_step);
  const Mat half = state.x - hyper.eta * delta;
  state.x = is_comm_round(t, period) ? apply_mixing(half, weights) : half;
}

void oracle_step_cdadam(MatrixIterate& state, const Mat& gradients, long t,
                        const AdamHyper& hyper, const Mat& weights, int period,
                        double gamma, const CompressorSpec& compressor,
                        std::uint64_t seed) {
  const Mat delta = adaptive_directions(state, gradients, hyper,
                                        /*use_momentum=*/false);
  const Mat half = state.x - hyper.eta * delta;
  if (!is_comm_round(t, period)) {
    state.x = half;
    return;
  }
  // Xhat (W - I) evaluated as Xhat W - Xhat so both implementations share
  // one reduction order (ascending source index).
  const Mat mixed = apply_mixing(state.x_hat, weights);
  state.x = half + gamma * (mixed - state.x_hat);

  const long round = (t + 1) / period;
  const Eigen::Index k = state.x.cols();
  Mat q(state.x.rows(), k);
  for (Eigen::Index col = 0; col < k; ++col) {
    CounterRng rng(seed, StreamPurpose::compressor,
                   static_cast<std::uint64_t>(col),
                   static_cast<std::uint64_t>(round));
    q.col(col) =
        compress(compressor, state.x.col(col) - state.x_hat.col(col), rng).q;
  }
  state.x_hat += q;
}

}  // namespace decadam
