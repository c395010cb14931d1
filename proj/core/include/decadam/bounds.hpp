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

#include "decadam/errors.hpp"

namespace decadam {

// Closed-form worst-case consensus bounds for the two algorithm families,
// as functions of the run constants. Arguments: dimension d, step size eta,
// communication period p, per-coordinate gradient bound G, worker count K,
// denominator offset tau, spectral gap rho, contraction coefficient delta.

/// Full-precision gossip: (1 + 4/rho^2) * 2 d eta^2 p^2 G^2 K / tau^2.
inline double gossip_consensus_bound(double d, double eta, double p, double g_bound,
                           double k_workers, double tau, double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0,1]");
  if (d <= 0 || p <= 0 || g_bound < 0 || k_workers <= 0 || tau <= 0)
    throw ValidationError("bound constants must be positive");
  const double eta2 = eta * eta;
  return (1.0 + 4.0 / (rho * rho)) * 2.0 * d * eta2 * p * p * g_bound *
         g_bound * k_workers / (tau * tau);
}

/// alpha = rho^2 delta / 82, the contraction factor of the compressed
/// consensus recursion.
inline double compressed_contraction_alpha(double rho, double delta) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0,1]");
  if (!(delta > 0.0 && delta <= 1.0))
    throw ValidationError("delta must be in (0,1]");
  return rho * rho * delta / 82.0;
}

/// Compressed gossip: (8 d eta^2 p^2 G^2 K / tau^2) * (1 + 2/alpha^2).
inline double compressed_consensus_bound(double d, double eta, double p, double g_bound,
                           double k_workers, double tau, double rho,
                           double delta) {
  if (d <= 0 || p <= 0 || g_bound < 0 || k_workers <= 0 || tau <= 0)
    throw ValidationError("bound constants must be positive");
  const double alpha = compressed_contraction_alpha(rho, delta);
  const double eta2 = eta * eta;
  return 8.0 * d * eta2 * p * p * g_bound * g_bound * k_workers /
         (tau * tau) * (1.0 + 2.0 / (alpha * alpha));
}

/// Theory-prescribed consensus step size for the compressed variant:
///   gamma = rho delta / (16 rho + rho^2 + 4 beta^2 + 2 rho beta^2
///           - 8 rho delta),
/// with beta = max_i (1 - lambda_i) of the mixing matrix.
inline double stability_gamma(double rho, double beta, double delta) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ValidationError("rho must be in (0,1]");
  if (!(delta > 0.0 && delta <= 1.0))
    throw ValidationError("delta must be in (0,1]");
  const double denom = 16.0 * rho + rho * rho + 4.0 * beta * beta +
                       2.0 * rho * beta * beta - 8.0 * rho * delta;
  if (!(denom > 0.0)) throw ValidationError("degenerate stability formula");
  return rho * delta / denom;
}

}  // namespace decadam
