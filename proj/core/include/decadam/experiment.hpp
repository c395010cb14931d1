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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decadam/analysis.hpp"
#include "decadam/engine.hpp"

namespace decadam {

// One experiment = one run directory holding trace.csv plus manifest.json.
// The manifest pins everything needed to reproduce the trace bit-exactly:
// feeding it back as --config replays the run.

struct ExperimentResult {
  RunTrace trace;
  std::filesystem::path trace_path;
  std::filesystem::path manifest_path;
};

ExperimentResult run_experiment(const RunConfig& cfg,
                                const std::filesystem::path& out_dir);

struct LoadedRun {
  RunConfig config;
  RunSummary summary;
  std::string trace_header_hash;
  std::filesystem::path trace_path;
};

/// Reads a run directory back, cross-checking the trace header hash
/// recorded in the manifest against the actual trace file.
LoadedRun load_run_dir(const std::filesystem::path& run_dir);

/// Bound reports for a finished run: the matching consensus bound for the
/// adaptive algorithms, none for the constant-rate baseline. Serialized as
/// a JSON report, including the run summary.
std::string analyze_run_dir(const std::filesystem::path& run_dir,
                            const std::string& bound = "auto");

struct SweepResult {
  std::vector<std::filesystem::path> run_dirs;
  std::filesystem::path manifest_path;
};

/// Expands a grid config (list-valued keys) into the Cartesian product of
/// child runs under out_dir/run_NNNN, executed across `jobs` threads.
SweepResult run_sweep(const std::string& grid_config_text,
                      const std::filesystem::path& out_dir, int jobs);

/// Tab-separated copy of a trace suitable for gnuplot / vega-lite.
std::string plot_data_for_run(const std::filesystem::path& run_dir);

}  // namespace decadam
