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

#include "decadam/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "config_internal.hpp"
#include "decadam/errors.hpp"

namespace decadam {

namespace {

using nlohmann::json;

[[noreturn]] void type_error(const std::string& path,
                             const std::string& expected) {
  throw ConfigError("config key '" + path + "': expected " + expected);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& prefix) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key))
      throw ConfigError("unknown config key '" + prefix + key + "'");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) type_error(path, "a number");
  return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) type_error(path, "an integer");
  return j.get<long>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) type_error(path, "a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) type_error(path, "a boolean");
  return j.get<bool>();
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace

namespace detail {

json config_to_json(const RunConfig& cfg) {
  json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["T"] = cfg.total_iters;
  j["p"] = cfg.period;
  j["seed"] = cfg.seed;
  j["eval_every"] = cfg.eval_every;
  if (cfg.gamma.auto_mode)
    j["gamma"] = "auto";
  else
    j["gamma"] = cfg.gamma.value;
  json adam;
  adam["eta"] = cfg.adam.eta;
  adam["beta1"] = cfg.adam.beta1;
  adam["beta2"] = cfg.adam.beta2;
  adam["tau"] = cfg.adam.tau;
  if (cfg.use_momentum_in_step)
    adam["use_momentum_in_step"] = *cfg.use_momentum_in_step;
  j["adam"] = std::move(adam);
  json topo;
  topo["kind"] = to_string(cfg.topology.kind);
  topo["K"] = cfg.topology.num_workers;
  topo["weight_rule"] = to_string(cfg.topology.weight_rule);
  j["topology"] = std::move(topo);
  if (cfg.compressor) {
    json q;
    q["kind"] = to_string(cfg.compressor->kind);
    q["k"] = cfg.compressor->k;
    j["compressor"] = std::move(q);
  }
  json prob;
  prob["kind"] = to_string(cfg.problem.kind);
  prob["d"] = cfg.problem.dim;
  prob["heterogeneity"] = cfg.problem.heterogeneity;
  prob["sigma"] = cfg.problem.sigma;
  if (cfg.problem.clip_G) prob["clip_G"] = *cfg.problem.clip_G;
  prob["batch"] = cfg.problem.batch;
  prob["noise"] = to_string(cfg.problem.noise);
  j["problem"] = std::move(prob);
  return j;
}

RunConfig config_from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("config root must be an object");
  // A manifest doubles as a config: its resolved_config reproduces the run.
  if (root.contains("resolved_config"))
    return config_from_json(root.at("resolved_config"));

  reject_unknown_keys(root,
                      {"algorithm", "T", "p", "seed", "eval_every", "gamma",
                       "adam", "topology", "compressor", "problem"},
                      "");
  RunConfig cfg;
  if (root.contains("algorithm"))
    cfg.algorithm = algorithm_from_string(
        get_string(root["algorithm"], "algorithm"));
  if (root.contains("T")) cfg.total_iters = get_integer(root["T"], "T");
  if (root.contains("p"))
    cfg.period = static_cast<int>(get_integer(root["p"], "p"));
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer()) type_error("seed", "an integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("eval_every"))
    cfg.eval_every =
        static_cast<int>(get_integer(root["eval_every"], "eval_every"));
  if (root.contains("gamma")) {
    const json& g = root["gamma"];
    if (g.is_string()) {
      if (g.get<std::string>() != "auto")
        throw ConfigError("config key 'gamma': expected a number or \"auto\"");
      cfg.gamma.auto_mode = true;
    } else {
      cfg.gamma.auto_mode = false;
      cfg.gamma.value = get_number(g, "gamma");
    }
  }
  if (root.contains("adam")) {
    const json& a = root["adam"];
    if (!a.is_object()) type_error("adam", "an object");
    reject_unknown_keys(
        a, {"eta", "beta1", "beta2", "tau", "use_momentum_in_step"}, "adam.");
    if (a.contains("eta")) cfg.adam.eta = get_number(a["eta"], "adam.eta");
    if (a.contains("beta1"))
      cfg.adam.beta1 = get_number(a["beta1"], "adam.beta1");
    if (a.contains("beta2"))
      cfg.adam.beta2 = get_number(a["beta2"], "adam.beta2");
    if (a.contains("tau")) cfg.adam.tau = get_number(a["tau"], "adam.tau");
    if (a.contains("use_momentum_in_step"))
      cfg.use_momentum_in_step =
          get_bool(a["use_momentum_in_step"], "adam.use_momentum_in_step");
  }
  if (root.contains("topology")) {
    const json& t = root["topology"];
    if (!t.is_object()) type_error("topology", "an object");
    reject_unknown_keys(t, {"kind", "K", "weight_rule"}, "topology.");
    if (t.contains("kind"))
      cfg.topology.kind =
          topology_kind_from_string(get_string(t["kind"], "topology.kind"));
    if (t.contains("K"))
      cfg.topology.num_workers =
          static_cast<int>(get_integer(t["K"], "topology.K"));
    if (t.contains("weight_rule"))
      cfg.topology.weight_rule = weight_rule_from_string(
          get_string(t["weight_rule"], "topology.weight_rule"));
  }
  if (root.contains("compressor")) {
    const json& q = root["compressor"];
    if (!q.is_object()) type_error("compressor", "an object");
    reject_unknown_keys(q, {"kind", "k"}, "compressor.");
    if (!q.empty()) {  // an empty section counts as unset
      CompressorSpec spec;
      if (!q.contains("kind"))
        throw ConfigError("config key 'compressor.kind' is required");
      spec.kind = compressor_kind_from_string(
          get_string(q["kind"], "compressor.kind"));
      if (q.contains("k"))
        spec.k = static_cast<int>(get_integer(q["k"], "compressor.k"));
      cfg.compressor = spec;
    }
  }
  if (root.contains("problem")) {
    const json& p = root["problem"];
    if (!p.is_object()) type_error("problem", "an object");
    reject_unknown_keys(
        p, {"kind", "d", "heterogeneity", "sigma", "clip_G", "batch", "noise"},
        "problem.");
    if (p.contains("kind"))
      cfg.problem.kind =
          problem_kind_from_string(get_string(p["kind"], "problem.kind"));
    if (p.contains("d"))
      cfg.problem.dim = static_cast<int>(get_integer(p["d"], "problem.d"));
    if (p.contains("heterogeneity"))
      cfg.problem.heterogeneity =
          get_number(p["heterogeneity"], "problem.heterogeneity");
    if (p.contains("sigma"))
      cfg.problem.sigma = get_number(p["sigma"], "problem.sigma");
    if (p.contains("clip_G") && !p["clip_G"].is_null())
      cfg.problem.clip_G = get_number(p["clip_G"], "problem.clip_G");
    if (p.contains("batch"))
      cfg.problem.batch =
          static_cast<int>(get_integer(p["batch"], "problem.batch"));
    if (p.contains("noise"))
      cfg.problem.noise =
          noise_kind_from_string(get_string(p["noise"], "problem.noise"));
  }
  cfg.validate();
  return cfg;
}

}  // namespace detail

RunConfig load_config_string(const std::string& text) {
  return detail::config_from_json(parse_text(text));
}

RunConfig load_config_file(const std::string& path) {
  return detail::config_from_json(read_json_file(path));
}

std::string emit_config(const RunConfig& cfg, int indent) {
  return detail::config_to_json(cfg).dump(indent);
}

namespace {

void collect_grid_paths(const json& node, const std::string& prefix,
                        std::vector<std::string>& paths) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      collect_grid_paths(value, prefix.empty() ? key : prefix + "." + key,
                         paths);
  } else if (node.is_array()) {
    if (node.empty())
      throw ConfigError("grid key '" + prefix + "' must not be empty");
    paths.push_back(prefix);
  }
}

json* descend(json& root, const std::string& dotted) {
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    node = &node->at(key);
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

}  // namespace

std::vector<std::string> expand_grid_string(const std::string& text) {
  json root = parse_text(text);
  std::vector<std::string> paths;
  collect_grid_paths(root, "", paths);
  std::sort(paths.begin(), paths.end());

  std::vector<std::string> out;
  if (paths.empty()) {
    detail::config_from_json(root);  // validate
    out.push_back(root.dump());
    return out;
  }

  std::vector<json> values;
  values.reserve(paths.size());
  for (const auto& p : paths) {
    json copy = root;
    values.push_back(*descend(copy, p));
  }
  std::vector<std::size_t> index(paths.size(), 0);
  for (;;) {
    json instance = root;
    for (std::size_t i = 0; i < paths.size(); ++i)
      *descend(instance, paths[i]) = values[i][index[i]];
    detail::config_from_json(instance);  // validate each child early
    out.push_back(instance.dump());
    // Odometer: rightmost path varies fastest.
    std::size_t pos = paths.size();
    while (pos > 0) {
      --pos;
      if (++index[pos] < values[pos].size()) break;
      index[pos] = 0;
      if (pos == 0) return out;
    }
  }
}

std::vector<std::string> expand_grid_file(const std::string& path) {
  return expand_grid_string(read_json_file(path).dump());
}

}  // namespace decadam
