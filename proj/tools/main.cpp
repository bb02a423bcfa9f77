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

// kcsr command-line tool. Configuration precedence, lowest first: built-in
// defaults, --config file, KCSR_OUTPUT_DIR, individual flags.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "kcsr/commands.hpp"
#include "kcsr/config.hpp"

namespace {

struct Options {
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::string plot_dir;
  std::string plot_input;
};

kcsr::RunConfig resolve(const Options& opts) {
  kcsr::ParsedConfig parsed;
  if (!opts.config_path.empty()) parsed = kcsr::parse_config_file(opts.config_path, false);
  kcsr::RunConfig& config = parsed.config;
  if (const char* env = std::getenv(kcsr::kOutputDirEnv); env && *env) {
    kcsr::set_config_value(config, "output_dir", env);
    parsed.lines.erase("output_dir");
  }
  for (const auto& key : kcsr::config_keys()) {
    const auto it = opts.flags.find(key.name);
    if (it == opts.flags.end()) continue;
    try {
      kcsr::set_config_value(config, key.name, it->second);
    } catch (const kcsr::ConfigError& e) {
      throw kcsr::ConfigError("--" + key.name + ": " + e.what());
    }
    parsed.lines.erase(key.name);
  }
  try {
    kcsr::resolve_config(config, parsed.notices);
  } catch (const kcsr::ConfigError& e) {
    // Point at the file line when the offending value came from it.
    const auto issue = kcsr::check_config(config);
    if (issue) {
      const auto line = parsed.lines.find(issue->key);
      if (line != parsed.lines.end()) {
        throw kcsr::ConfigError(opts.config_path + ":" + std::to_string(line->second) + ": " + issue->message);
      }
      if (opts.flags.count(issue->key)) throw kcsr::ConfigError("--" + issue->key + ": " + issue->message);
    }
    throw;
  }
  for (const auto& notice : parsed.notices) std::cerr << "notice: " << notice << '\n';
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kcsr: kinetically constrained superradiance simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opts;
  app.add_option("-c,--config", opts.config_path, "Configuration file (key: value lines)")->check(CLI::ExistingFile);
  for (const auto& key : kcsr::config_keys()) {
    app.add_option_function<std::string>(
           "--" + key.name, [&opts, name = key.name](const std::string& v) { opts.flags[name] = v; }, key.help)
        ->group("Configuration");
  }

  auto* evolve = app.add_subcommand("evolve", "Master-equation evolution (or trajectories with engine=trajectories)");
  auto* traj = app.add_subcommand("trajectories", "Quantum-jump ensemble with entropy statistics");
  auto* scaling = app.add_subcommand("scaling", "Burst features over a sweep of N and scaling fits");
  auto* dicke = app.add_subcommand("dicke", "Collective ladder reference burst");
  auto* verify = app.add_subcommand("verify", "Invariant suite; nonzero exit on any failure");
  auto* plot = app.add_subcommand("plot", "Render CSV artifacts to SVG");
  plot->add_option("--dir", opts.plot_dir, "Directory to scan (default: output_dir)");
  plot->add_option("input", opts.plot_input, "Single CSV file to render")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const kcsr::RunConfig config = resolve(opts);
    if (evolve->parsed()) {
      kcsr::command_evolve(config, std::cout);
    } else if (traj->parsed()) {
      kcsr::command_trajectories(config, std::cout);
    } else if (scaling->parsed()) {
      kcsr::command_scaling(config, std::cout);
    } else if (dicke->parsed()) {
      kcsr::command_dicke(config, std::cout);
    } else if (verify->parsed()) {
      const auto results = kcsr::command_verify(config, std::cout);
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
    } else if (plot->parsed()) {
      kcsr::command_plot(opts.plot_dir.empty() ? config.output_dir : opts.plot_dir, opts.plot_input, std::cout);
    }
  } catch (const std::exception& e) {
    const int code = kcsr::exit_code_for(e);
    const char* family = code == 1 ? "invariant violation" : code == 2 ? "configuration error" : "numerical failure";
    std::cerr << "kcsr: " << family << ": " << e.what() << '\n';
    return code;
  }
  return 0;
}
