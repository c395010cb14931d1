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

#include "decadam/optimizer.hpp"

#include <cmath>

#include "decadam/errors.hpp"

namespace decadam {

void AdamHyper::validate() const {
  if (!(eta > 0.0)) throw ValidationError("eta must be > 0");
  if (beta1 < 0.0 || beta1 > 1.0) throw ValidationError("beta1 must be in [0,1]");
  if (beta2 < 0.0 || beta2 > 1.0) throw ValidationError("beta2 must be in [0,1]");
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("tau must be in (0,1)");
}

AdamStep adam_local_step(const Vec& x, const MomentState& state, const Vec& g,
                         const AdamHyper& hyper, bool use_momentum_in_step) {
  if (!all_finite(g)) throw ValidationError("non-finite gradient");
  const int d = static_cast<int>(x.size());
  AdamStep out;
  out.state.m = Vec(d);
  out.state.v = Vec(d);
  out.x_half = Vec(d);
  // Expression shapes mirror the matrix-form reference so both routes make
  // bit-identical updates.
  for (int j = 0; j < d; ++j) {
    const double mj = hyper.beta1 * state.m[j] + (1.0 - hyper.beta1) * g[j];
    const double vj =
        hyper.beta2 * state.v[j] + (1.0 - hyper.beta2) * (g[j] * g[j]);
    const double numerator = use_momentum_in_step ? mj : g[j];
    out.state.m[j] = mj;
    out.state.v[j] = vj;
    out.x_half[j] =
        x[j] - hyper.eta * (numerator / (std::sqrt(vj) + hyper.tau));
  }
  return out;
}

}  // namespace decadam
