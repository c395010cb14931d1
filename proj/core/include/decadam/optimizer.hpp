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

#include "decadam/types.hpp"

namespace decadam {

/// Per-worker adaptive step hyperparameters. No bias correction is applied
/// anywhere: moments start at zero and enter the step as accumulated.
struct AdamHyper {
  double eta = 1e-3;    // initial learning rate
  double beta1 = 0.9;   // first-moment decay
  double beta2 = 0.999; // second-moment decay
  double tau = 0.1;     // denominator offset, in (0, 1)

  void validate() const;

  bool operator==(const AdamHyper&) const = default;
};

struct MomentState {
  Vec m;  // first moment
  Vec v;  // second moment, elementwise >= 0

  static MomentState zeros(int dim) {
    return MomentState{Vec::Zero(dim), Vec::Zero(dim)};
  }
};

struct AdamStep {
  Vec x_half;
  MomentState state;
};

/// One local update:
///   m' = b1*m + (1-b1)*g
///   v' = b2*v + (1-b2)*g.*g
///   x_half = x - eta * u ./ (sqrt(v') + tau),  u = m' or g
/// The numerator choice is the only difference between the two decentralized
/// variants' local phases.
/// Throws ValidationError on non-finite gradient input.
AdamStep adam_local_step(const Vec& x, const MomentState& state, const Vec& g,
                         const AdamHyper& hyper, bool use_momentum_in_step);

}  // namespace decadam
