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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "decadam/config.hpp"
#include "decadam/experiment.hpp"
#include "decadam/parallel.hpp"
#include "decadam/trace.hpp"
#include "decadam/verification.hpp"
#include "decadam/version.hpp"

namespace {

using nlohmann::json;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, std::optional<int> eval_every) {
  decadam::RunConfig cfg = decadam::load_config_file(config_path);
  if (seed) cfg.seed = *seed;
  if (eval_every) cfg.eval_every = *eval_every;
  const auto result = decadam::run_experiment(cfg, out_dir);
  std::cout << "wrote " << result.trace_path.string() << " ("
            << result.trace.rows.size() << " rows, "
            << result.trace.summary.comm_rounds_total << " comm rounds, "
            << result.trace.summary.comm_bits_total << " bits)\n"
            << "wrote " << result.manifest_path.string() << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int jobs) {
  std::ifstream in(config_path);
  if (!in) throw decadam::IoError("cannot open config file: " + config_path);
  std::ostringstream text;
  text << in.rdbuf();
  const auto result = decadam::run_sweep(text.str(), out_dir, jobs);
  std::cout << "expanded " << result.run_dirs.size() << " run(s) under "
            << out_dir << "\n"
            << "wrote " << result.manifest_path.string() << "\n";
  return 0;
}

int cmd_analyze(const std::string& run_dir, const std::string& bound) {
  const std::string report = decadam::analyze_run_dir(run_dir, bound);
  std::cout << report << "\n";
  const auto parsed = json::parse(report);
  return parsed.at("all_bounds_satisfied").get<bool>() ? 0 : 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials) {
  std::vector<decadam::SuiteResult> results;
  if (suite == "all" || suite == "mixing")
    results.push_back(decadam::verify_mixing_suite(seed));
  if (suite == "all" || suite == "contraction")
    results.push_back(decadam::verify_contraction_suite(seed, trials));
  if (suite == "all" || suite == "equivalence")
    results.push_back(decadam::verify_equivalence_suite(seed));
  if (results.empty()) {
    std::cerr << "unknown suite: " << suite
              << " (expected all|mixing|contraction|equivalence)\n";
    return 2;
  }
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": "
              << r.detail << "\n";
    for (const auto& f : r.failures) std::cout << "       " << f << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

int cmd_topology_inspect(const std::string& kind, int num_workers,
                         const std::string& rule) {
  const auto topo = decadam::build_topology(
      decadam::topology_kind_from_string(kind), num_workers,
      decadam::weight_rule_from_string(rule));
  json out;
  out["kind"] = kind;
  out["K"] = num_workers;
  out["weight_rule"] = rule;
  json w = json::array();
  for (int i = 0; i < topo.num_workers; ++i) {
    json row = json::array();
    for (int j = 0; j < topo.num_workers; ++j) row.push_back(topo.weights(i, j));
    w.push_back(std::move(row));
  }
  out["W"] = std::move(w);
  out["eigenvalues"] = decadam::mixing_eigenvalues(topo.weights);
  out["second_eig_mod"] = topo.second_eig_mod;
  out["spectral_gap"] = topo.spectral_gap;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_plot(const std::string& run_dir, const std::string& out_file) {
  const std::string data = decadam::plot_data_for_run(run_dir);
  if (out_file.empty()) {
    std::cout << data;
  } else {
    decadam::write_text_atomic(out_file, data);
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decadam - decentralized adaptive optimization simulator"};
  app.set_version_flag("--version", decadam::kVersion);
  app.require_subcommand(1);

  // run
  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> eval_every_override;
  auto* run = app.add_subcommand("run", "execute one experiment");
  run->add_option("--config", config_path, "config or manifest JSON")
      ->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--out", out_dir, "output directory (trace + manifest)");
  run->add_option("--eval-every", eval_every_override,
                  "override metric evaluation interval");

  // sweep
  std::string sweep_config, sweep_out = "sweep";
  int jobs = decadam::default_jobs();
  auto* sweep = app.add_subcommand(
      "sweep", "expand list-valued config keys into child runs");
  sweep->add_option("--config", sweep_config, "grid config JSON")->required();
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--jobs", jobs, "parallel runs (env DECADAM_JOBS)");

  // analyze
  std::string analyze_dir, bound = "auto";
  auto* analyze = app.add_subcommand(
      "analyze", "consensus-bound reports for a finished run");
  analyze->add_option("--run", analyze_dir, "run directory")->required();
  analyze->add_option("--bound", bound, "auto|gossip|compressed");

  // verify
  std::string suite = "all";
  std::uint64_t verify_seed = 20260101;
  int verify_trials = 10000;
  auto* verify = app.add_subcommand(
      "verify", "run the built-in correctness suites");
  verify->add_option("suite", suite, "all|mixing|contraction|equivalence");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--trials", verify_trials, "contraction sample count");

  // topology inspect
  auto* topology = app.add_subcommand("topology", "topology utilities");
  topology->require_subcommand(1);
  std::string topo_kind = "ring", topo_rule = "uniform_neighbor";
  int topo_k = 8;
  auto* inspect = topology->add_subcommand(
      "inspect", "print W, eigenvalues and spectral gap as JSON");
  inspect->add_option("--kind", topo_kind, "ring|complete|grid2d|star_regularized");
  inspect->add_option("--K", topo_k, "worker count");
  inspect->add_option("--weight-rule", topo_rule, "uniform_neighbor|metropolis");

  // plot
  std::string plot_dir, plot_out;
  auto* plot = app.add_subcommand(
      "plot", "emit gnuplot-compatible data for a finished run");
  plot->add_option("--run", plot_dir, "run directory")->required();
  plot->add_option("--out", plot_out, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, seed_override, out_dir, eval_every_override);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, jobs);
    if (analyze->parsed()) return cmd_analyze(analyze_dir, bound);
    if (verify->parsed()) return cmd_verify(suite, verify_seed, verify_trials);
    if (topology->parsed())
      return cmd_topology_inspect(topo_kind, topo_k, topo_rule);
    if (plot->parsed()) return cmd_plot(plot_dir, plot_out);
  } catch (const decadam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const decadam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
