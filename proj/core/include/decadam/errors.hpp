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

#include <stdexcept>
#include <string>

namespace decadam {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid domain input (bad matrix, bad compressor parameters, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Failure raised while driving a simulation (NaN gradients, protocol bugs).
struct EngineError : Error {
  using Error::Error;
};

/// Filesystem / serialization problems in the experiment harness.
struct IoError : Error {
  using Error::Error;
};

}  // namespace decadam
