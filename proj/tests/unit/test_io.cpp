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

#include <filesystem>
#include <sstream>

#include "kcsr/commands.hpp"
#include "kcsr/io.hpp"
#include "kcsr/plot.hpp"

using namespace kcsr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kcsr_test_io_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_trajectory_config(const fs::path& dir, int threads) {
  RunConfig c;
  c.params.n_sites = 5;
  c.engine = Engine::trajectories;
  c.evolution.t_max = c.trajectory.t_max = 2.0;
  c.trajectory.n_traj = 40;
  c.trajectory.threads = threads;
  c.output_dir = dir.string();
  return c;
}

}  // namespace

TEST_CASE("timeseries header is pinned") {
  const std::string golden = read_text_file(KCSR_GOLDEN_DIR "/timeseries_header_n4.csv");
  ChainParams p;
  p.n_sites = 4;
  const std::string csv = to_csv(timeseries_table({}, p));
  CHECK(csv == golden);
}

TEST_CASE("csv round trip") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{0.1, 1e-300}, {-2.5, NAN}};
  const std::string text = to_csv(t);
  CHECK(text == "a,b\n0.10000000000000001,1e-300\n-2.5,nan\n");
  const CsvTable back = parse_csv(text);
  CHECK(back.header == t.header);
  CHECK(back.rows[0] == t.rows[0]);
  CHECK(std::isnan(back.rows[1][1]));
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ConfigError);
  CHECK_THROWS_AS(t.column("c"), ConfigError);
}

TEST_CASE("momentum ratios are NaN once the chain is empty") {
  ObservableRecord r;
  r.n_total = 0.0;
  r.momentum_occ = {0.0, 0.0, 0.0};
  ChainParams p;
  p.n_sites = 3;
  const CsvTable t = timeseries_table({r}, p);
  CHECK(std::isnan(t.rows[0][9]));
}

TEST_CASE("artifacts are byte-identical across reruns and thread counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream log;
  command_trajectories(small_trajectory_config(a, 1), log);
  command_trajectories(small_trajectory_config(b, 3), log);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "resolved_config.txt") continue;  // records the thread count
    CHECK_MESSAGE(read_text_file(entry.path().string()) == read_text_file((b / name).string()), name);
    ++compared;
  }
  CHECK(compared >= 8);

  const fs::path c = scratch("det_c");
  command_trajectories(small_trajectory_config(c, 1), log);
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().filename() == "resolved_config.txt") continue;  // records output_dir
    CHECK(read_text_file(entry.path().string()) == read_text_file((c / entry.path().filename()).string()));
  }
}

TEST_CASE("resolved config is written and parses back") {
  const fs::path dir = scratch("resolved");
  RunConfig c;
  c.params.n_sites = 3;
  c.evolution.t_max = c.trajectory.t_max = 0.0;
  c.output_dir = dir.string();
  std::ostringstream log;
  command_evolve(c, log);
  CHECK(parse_config_file((dir / "resolved_config.txt").string()).config == c);
  const CsvTable t = read_csv((dir / "timeseries.csv").string());
  CHECK(t.rows.size() == 1);
}

TEST_CASE("svg output") {
  const std::string svg = line_plot_svg({{"a", {0, 1, 2}, {1, NAN, 3}}}, {"title", "x", "y"});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  PlotOptions log_opts{"t", "x", "y"};
  log_opts.log_y = true;
  CHECK_NOTHROW(line_plot_svg({{"a", {1, 2, 3}, {0, 1, 10}}}, log_opts));
  const std::string hist = histogram_svg({0, 1, 2}, {3, 4}, {"h", "S", "count"});
  CHECK(hist.find("<rect") != std::string::npos);
}
