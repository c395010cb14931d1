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

#include "decadam/experiment.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "config_internal.hpp"
#include "decadam/config.hpp"
#include "decadam/errors.hpp"
#include "decadam/parallel.hpp"
#include "decadam/trace.hpp"
#include "decadam/version.hpp"

namespace decadam {

namespace {

using nlohmann::json;

std::int64_t now_unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json summary_to_json(const RunSummary& s) {
  json j;
  j["final_loss"] = s.final_loss;
  j["final_grad_norm_sq"] = s.final_grad_norm_sq;
  j["avg_grad_norm_sq"] = s.avg_grad_norm_sq;
  j["max_consensus_err"] = s.max_consensus_err;
  j["empirical_G"] = s.empirical_G;
  j["comm_bits_total"] = s.comm_bits_total;
  j["comm_rounds_total"] = s.comm_rounds_total;
  return j;
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.final_loss = j.at("final_loss").get<double>();
  s.final_grad_norm_sq = j.at("final_grad_norm_sq").get<double>();
  s.avg_grad_norm_sq = j.at("avg_grad_norm_sq").get<double>();
  s.max_consensus_err = j.at("max_consensus_err").get<double>();
  s.empirical_G = j.at("empirical_G").get<double>();
  s.comm_bits_total = j.at("comm_bits_total").get<std::uint64_t>();
  s.comm_rounds_total = j.at("comm_rounds_total").get<long>();
  return s;
}

json bound_report_to_json(const BoundReport& r, bool clipped) {
  json j;
  j["bound_name"] = r.bound_name;
  j["theoretical_value"] = r.theoretical_value;
  j["empirical_value"] = r.empirical_value;
  j["satisfied"] = r.satisfied;
  // Whether the per-coordinate bound G is exact (clipped oracle) or the
  // empirical maximum observed during the run.
  j["G_source"] = clipped ? "clip_G" : "empirical_max";
  json in;
  in["d"] = r.inputs.d;
  in["eta"] = r.inputs.eta;
  in["p"] = r.inputs.p;
  in["G"] = r.inputs.G;
  in["K"] = r.inputs.K;
  in["tau"] = r.inputs.tau;
  in["rho"] = r.inputs.rho;
  if (r.inputs.delta > 0) {
    in["delta"] = r.inputs.delta;
    in["alpha"] = r.inputs.alpha;
  }
  j["inputs"] = std::move(in);
  return j;
}

std::string make_trace_header(const RunConfig& cfg, const RunSummary& s) {
  json header;
  header["config"] = detail::config_to_json(cfg);
  header["config"]["adam"]["use_momentum_in_step"] = s.use_momentum_in_step;
  header["topology_rho"] = s.topology_rho;
  header["version"] = kVersion;
  return header.dump();  // single line
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg,
                                const std::filesystem::path& out_dir) {
  cfg.validate();
  const std::int64_t started = now_unix_ms();
  ExperimentResult result;
  result.trace = run(cfg);
  const std::int64_t finished = now_unix_ms();

  const std::string header = make_trace_header(cfg, result.trace.summary);
  result.trace_path = out_dir / "trace.csv";
  result.manifest_path = out_dir / "manifest.json";
  write_trace_csv(result.trace_path, header, result.trace.rows);

  json manifest;
  manifest["decadam_version"] = kVersion;
  manifest["seed"] = cfg.seed;
  manifest["resolved_config"] = detail::config_to_json(cfg);
  manifest["topology_rho"] = result.trace.summary.topology_rho;
  manifest["topology_second_eig_mod"] =
      result.trace.summary.topology_second_eig_mod;
  manifest["use_momentum_in_step"] = result.trace.summary.use_momentum_in_step;
  if (cfg.algorithm == Algorithm::cd_adam)
    manifest["resolved_gamma"] = result.trace.summary.resolved_gamma;
  manifest["outputs"] = {{"trace_csv", "trace.csv"}};
  manifest["trace_header_fnv1a64"] = to_hex(fnv1a64(header));
  manifest["timestamps"] = {{"started_unix_ms", started},
                            {"finished_unix_ms", finished}};
  manifest["summary"] = summary_to_json(result.trace.summary);
  write_text_atomic(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

LoadedRun load_run_dir(const std::filesystem::path& run_dir) {
  const auto manifest_path = run_dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::parse_error& e) {
    throw IoError("malformed manifest: " + std::string(e.what()));
  }

  LoadedRun out;
  out.config = detail::config_from_json(manifest.at("resolved_config"));
  out.summary = summary_from_json(manifest.at("summary"));
  out.summary.topology_rho = manifest.at("topology_rho").get<double>();
  out.summary.topology_second_eig_mod =
      manifest.value("topology_second_eig_mod", 0.0);
  out.summary.use_momentum_in_step =
      manifest.at("use_momentum_in_step").get<bool>();
  out.summary.resolved_gamma = manifest.value("resolved_gamma", 0.0);
  out.trace_header_hash =
      manifest.at("trace_header_fnv1a64").get<std::string>();
  out.trace_path =
      run_dir / manifest.at("outputs").at("trace_csv").get<std::string>();

  const TraceFile trace = read_trace_csv(out.trace_path);
  if (to_hex(fnv1a64(trace.header_json)) != out.trace_header_hash)
    throw IoError("trace header hash does not match manifest in " +
                  run_dir.string());
  return out;
}

std::string analyze_run_dir(const std::filesystem::path& run_dir,
                            const std::string& bound) {
  const LoadedRun loaded = load_run_dir(run_dir);
  json report;
  report["run_dir"] = run_dir.string();
  report["algorithm"] = to_string(loaded.config.algorithm);
  report["summary"] = summary_to_json(loaded.summary);
  report["topology_rho"] = loaded.summary.topology_rho;

  std::vector<BoundReport> bounds;
  const bool adam_family =
      loaded.config.algorithm == Algorithm::d_adam ||
      loaded.config.algorithm == Algorithm::d_adam_vanilla;
  if (bound == "gossip" || (bound == "auto" && adam_family)) {
    bounds.push_back(check_consensus_bound(loaded.summary, loaded.config,
                                           ConsensusBoundKind::gossip));
  } else if (bound == "compressed" ||
             (bound == "auto" &&
              loaded.config.algorithm == Algorithm::cd_adam)) {
    bounds.push_back(check_consensus_bound(loaded.summary, loaded.config,
                                           ConsensusBoundKind::compressed));
  } else if (bound != "auto") {
    throw ValidationError("unknown bound selector: " + bound);
  }

  report["bounds"] = json::array();
  bool all_ok = true;
  for (const auto& b : bounds) {
    report["bounds"].push_back(
        bound_report_to_json(b, loaded.config.problem.clip_G.has_value()));
    all_ok = all_ok && b.satisfied;
  }
  report["all_bounds_satisfied"] = all_ok;
  return report.dump(2);
}

SweepResult run_sweep(const std::string& grid_config_text,
                      const std::filesystem::path& out_dir, int jobs) {
  const auto children = expand_grid_string(grid_config_text);
  SweepResult result;
  result.run_dirs.resize(children.size());

  parallel_for(static_cast<int>(children.size()), jobs, [&](int i) {
    char name[32];
    std::snprintf(name, sizeof(name), "run_%04d", i);
    const auto dir = out_dir / name;
    const RunConfig cfg = load_config_string(children[i]);
    run_experiment(cfg, dir);
    result.run_dirs[i] = dir;
  });

  json manifest;
  manifest["decadam_version"] = kVersion;
  manifest["n_runs"] = children.size();
  manifest["runs"] = json::array();
  for (std::size_t i = 0; i < children.size(); ++i) {
    json entry;
    entry["dir"] = result.run_dirs[i].filename().string();
    entry["config"] = json::parse(children[i]);
    manifest["runs"].push_back(std::move(entry));
  }
  result.manifest_path = out_dir / "sweep_manifest.json";
  write_text_atomic(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

std::string plot_data_for_run(const std::filesystem::path& run_dir) {
  const LoadedRun loaded = load_run_dir(run_dir);
  const TraceFile trace = read_trace_csv(loaded.trace_path);
  std::string out = "# decadam trace ";
  out += run_dir.string();
  out += "\n# columns: t loss_avg_iterate grad_norm_sq_avg_iterate "
         "consensus_err comm_bits_cum comm_rounds_cum\n";
  char buf[192];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%ld\t%.17g\t%.17g\t%.17g\t%" PRIu64
                  "\t%ld\n",
                  r.t, r.loss, r.grad_norm_sq, r.consensus_err,
                  r.comm_bits_cum, r.comm_rounds_cum);
    out += buf;
  }
  return out;
}

}  // namespace decadam
