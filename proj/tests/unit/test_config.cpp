// Copyright 2026 The kcsr Authors
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

#include <doctest.h>

#include <string>

#include "kcsr/config.hpp"

using namespace kcsr;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config resolves with defaults") {
  const ParsedConfig p = parse_config("N: 6\ndelta: 1.0\nj_int: 0.2\ngamma: 1.0\nengine: master\n");
  const RunConfig& c = p.config;
  CHECK(c.params.n_sites == 6);
  CHECK(c.engine == Engine::master);
  CHECK(c.mode == EmissionMode::kc);
  CHECK(c.evolution == EvolutionConfig{});
  CHECK(c.output_dir == "kcsr_out");
  CHECK(c.trajectory.master_seed == TrajectoryConfig{}.master_seed);
  CHECK(c.trajectory.t_max == c.evolution.t_max);
  CHECK(p.notices.empty());
  CHECK(emit_config(c).rfind("# kcsr resolved configuration\n", 0) == 0);
}

TEST_CASE("rejections carry the line number") {
  CHECK(error_of("N: 2\n") == "test.cfg:1: N >= 3 required");
  CHECK(error_of("# comment\nbogus: 1\n").rfind("test.cfg:2:", 0) == 0);
  CHECK(error_of("N: 6\nN: 7\n").find("duplicate key") != std::string::npos);
  CHECK(error_of("delta = -1\n").rfind("test.cfg:1:", 0) == 0);
  CHECK(error_of("N: six\n").rfind("test.cfg:1:", 0) == 0);
  CHECK(error_of("just words\n").rfind("test.cfg:1:", 0) == 0);
  CHECK(error_of("N: 14\n").find("master engine") != std::string::npos);
  CHECK(error_of("N: 14\nengine: trajectories\n").empty());
}

TEST_CASE("dicke rate default") {
  const ParsedConfig p = parse_config("mode: dicke\ngamma: 2\ndelta: 1.5\n");
  REQUIRE(p.config.dicke_rate.has_value());
  CHECK(*p.config.dicke_rate == doctest::Approx(2.0 * 1.5 * 1.5 * 1.5));
  REQUIRE(p.notices.size() == 1);
  CHECK(p.notices[0].find("dicke_rate") != std::string::npos);
  const ParsedConfig q = parse_config("mode: dicke\ndicke_rate: 0.5\n");
  CHECK(*q.config.dicke_rate == 0.5);
  CHECK(q.notices.empty());
}

TEST_CASE("round trip") {
  RunConfig c;
  c.mode = EmissionMode::dicke;
  c.dicke_rate = 0.1 + 0.2;
  c.params.n_sites = 9;
  c.params.j_int = 1.0 / 3.0;
  c.engine = Engine::trajectories;
  c.evolution.t_max = 7.25;
  c.trajectory.t_max = 7.25;
  c.trajectory.entropy_cut = {0, 2, 4};
  c.trajectory.master_seed = 18446744073709551615ull;
  c.initial = InitialState::config;
  c.initial_config = "110010011";
  c.artifacts = {"timeseries", "burst"};
  c.sweep = {4, 6, 9};
  c.output_dir = "some dir/out";
  CHECK(parse_config(emit_config(c)).config == c);
  const RunConfig d{};
  CHECK(parse_config(emit_config(d)).config == d);
}

TEST_CASE("list and range values") {
  RunConfig c;
  set_config_value(c, "sweep", "4..7");
  CHECK(c.sweep == std::vector<int>{4, 5, 6, 7});
  set_config_value(c, "artifacts", "none");
  CHECK(c.artifacts.empty());
  set_config_value(c, "artifacts", "all");
  CHECK(c.artifacts == artifact_names());
  CHECK_THROWS_AS(set_config_value(c, "artifacts", "movies"), ConfigError);
  set_config_value(c, "entropy_cut", "half");
  CHECK(c.trajectory.entropy_cut.empty());
  set_config_value(c, "t_max", "3");
  CHECK(c.evolution.t_max == 3.0);
  CHECK(c.trajectory.t_max == 3.0);
}

TEST_CASE("initial states") {
  RunConfig c;
  c.params.n_sites = 4;
  c.initial = InitialState::config;
  c.initial_config = "1010";
  const PureState psi = build_initial_state(c);
  CHECK(std::abs(psi.amplitudes(static_cast<Index>(parse_config_string("1010"))) - 1.0) == 0.0);
  c.initial = InitialState::vacuum;
  CHECK(std::abs(build_initial_state(c).amplitudes(0) - 1.0) == 0.0);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}
