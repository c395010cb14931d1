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

#include <doctest.h>

#include "decadam/config.hpp"
#include "decadam/errors.hpp"

using namespace decadam;

TEST_CASE("defaults fill unspecified keys") {
  const RunConfig cfg = load_config_string("{}");
  CHECK(cfg.adam.beta1 == 0.9);
  CHECK(cfg.adam.beta2 == 0.999);
  CHECK(cfg.adam.eta == 0.001);
  CHECK(cfg.adam.tau == 0.1);
  CHECK(cfg.gamma.value == 0.4);
  CHECK(!cfg.gamma.auto_mode);
  CHECK(cfg.algorithm == Algorithm::d_adam);
  CHECK(cfg.topology.kind == TopologyKind::ring);
  CHECK(cfg.topology.num_workers == 8);
  CHECK(!cfg.use_momentum_in_step.has_value());
}

TEST_CASE("omitted beta1 defaults while explicit keys win") {
  const RunConfig cfg =
      load_config_string(R"({"adam": {"eta": 0.01}, "p": 4})");
  CHECK(cfg.adam.beta1 == 0.9);
  CHECK(cfg.adam.eta == 0.01);
  CHECK(cfg.period == 4);
}

TEST_CASE("p = 0 is rejected") {
  CHECK_THROWS_WITH_AS(load_config_string(R"({"p": 0})"),
                       doctest::Contains("p must be >= 1"), ConfigError);
}

TEST_CASE("cd_adam without a compressor is rejected") {
  CHECK_THROWS_WITH_AS(load_config_string(R"({"algorithm": "cd_adam"})"),
                       doctest::Contains("compressor required"), ConfigError);
  // An empty compressor section counts as unset.
  CHECK_THROWS_WITH_AS(
      load_config_string(R"({"algorithm": "cd_adam", "compressor": {}})"),
      doctest::Contains("compressor required"), ConfigError);
}

TEST_CASE("unknown keys are a hard error with the key path") {
  CHECK_THROWS_WITH_AS(load_config_string(R"({"learning_rate": 0.1})"),
                       doctest::Contains("learning_rate"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config_string(R"({"problem": {"dee": 3}})"),
                       doctest::Contains("problem.dee"), ConfigError);
}

TEST_CASE("type mismatches name the key path and expected type") {
  CHECK_THROWS_WITH_AS(load_config_string(R"({"adam": {"eta": "fast"}})"),
                       doctest::Contains("adam.eta"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config_string(R"({"T": 10.5})"),
                       doctest::Contains("integer"), ConfigError);
}

TEST_CASE("gamma accepts a number or the literal auto") {
  CHECK(load_config_string(R"({"gamma": 0.25})").gamma.value == 0.25);
  CHECK(load_config_string(R"({"gamma": "auto"})").gamma.auto_mode);
  CHECK_THROWS_AS(load_config_string(R"({"gamma": "fast"})"), ConfigError);
}

TEST_CASE("load(emit(config)) round-trips") {
  const char* samples[] = {
      "{}",
      R"({"algorithm": "cd_adam", "gamma": "auto",
          "compressor": {"kind": "top_k", "k": 3},
          "problem": {"kind": "logistic", "d": 12, "clip_G": 2.0}})",
      R"({"algorithm": "d_psgd", "T": 5000, "p": 8, "seed": 17,
          "adam": {"eta": 0.05, "use_momentum_in_step": false},
          "topology": {"kind": "grid2d", "K": 12, "weight_rule": "metropolis"},
          "problem": {"kind": "nonconvex_toy", "sigma": 0.3,
                       "noise": "student_t", "batch": 4}})",
  };
  for (const char* text : samples) {
    const RunConfig cfg = load_config_string(text);
    const RunConfig round_tripped = load_config_string(emit_config(cfg));
    CHECK(round_tripped == cfg);
  }
}

TEST_CASE("manifest objects load through their resolved_config") {
  const RunConfig cfg = load_config_string(R"({"T": 321, "seed": 9})");
  const std::string manifest =
      std::string(R"({"resolved_config": )") + emit_config(cfg) +
      R"(, "summary": {"ignored": true}})";
  const RunConfig reloaded = load_config_string(manifest);
  CHECK(reloaded == cfg);
}

TEST_CASE("grid expansion is the cartesian product in odometer order") {
  const auto children = expand_grid_string(
      R"({"p": [1, 2, 4], "seed": [10, 20], "T": 8})");
  REQUIRE(children.size() == 6);
  const RunConfig first = load_config_string(children.front());
  CHECK(first.period == 1);
  CHECK(first.seed == 10);
  const RunConfig second = load_config_string(children[1]);
  CHECK(second.period == 1);
  CHECK(second.seed == 20);  // rightmost (by path order) varies fastest
  const RunConfig last = load_config_string(children.back());
  CHECK(last.period == 4);
  CHECK(last.seed == 20);
  for (const auto& c : children) CHECK(load_config_string(c).total_iters == 8);
}

TEST_CASE("grids over nested keys expand too") {
  const auto children = expand_grid_string(
      R"({"problem": {"d": [2, 3]}, "topology": {"K": [2, 4]}})");
  CHECK(children.size() == 4);
}

TEST_CASE("a scalar config expands to exactly itself") {
  const auto children = expand_grid_string(R"({"T": 5})");
  REQUIRE(children.size() == 1);
  CHECK(load_config_string(children[0]).total_iters == 5);
}
