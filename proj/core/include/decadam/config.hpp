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

#include <string>
#include <vector>

#include "decadam/engine.hpp"

namespace decadam {

// Nested-JSON run configuration. Unspecified keys take documented defaults
// (eta 0.001, beta1 0.9, beta2 0.999, tau 0.1, gamma 0.4, ring of 8 with
// uniform weights); unknown keys are a hard error, and type mismatches are
// reported with the offending key path.

RunConfig load_config_file(const std::string& path);
RunConfig load_config_string(const std::string& text);

/// Inverse of load_config_string: load(emit(cfg)) == cfg. Keeps "auto"
/// gamma and omits unset optional keys.
std::string emit_config(const RunConfig& cfg, int indent = 2);

/// A grid config replaces any scalar leaf with a list of values. Expansion
/// is the Cartesian product over all list-valued paths (sorted by path;
/// rightmost varies fastest); each element is a complete scalar config.
std::vector<std::string> expand_grid_string(const std::string& text);
std::vector<std::string> expand_grid_file(const std::string& path);

}  // namespace decadam
