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
#include <filesystem>
#include <string>
#include <vector>

#include "decadam/engine.hpp"

namespace decadam {

// Trace files are CSV with a one-line JSON header comment capturing the
// resolved config, the topology's spectral gap, and the package version.
// Doubles are printed with 17 significant digits so files round-trip
// bit-exactly.

inline constexpr const char* kTraceColumns =
    "t,loss_avg_iterate,grad_norm_sq_avg_iterate,consensus_err,"
    "comm_bits_cum,comm_rounds_cum";

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t value);

/// Write-temp-rename so readers never observe partial files.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string format_trace_csv(const std::string& header_json,
                             const std::vector<TraceRow>& rows);

void write_trace_csv(const std::filesystem::path& path,
                     const std::string& header_json,
                     const std::vector<TraceRow>& rows);

struct TraceFile {
  std::string header_json;  // without the leading "# "
  std::vector<TraceRow> rows;
};

TraceFile read_trace_csv(const std::filesystem::path& path);

}  // namespace decadam
