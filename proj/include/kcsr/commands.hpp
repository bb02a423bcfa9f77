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

#pragma once

// Subcommands of the kcsr tool. Each writes its artifacts plus
// resolved_config.txt into config.output_dir and throws the Error subclass
// matching its failure.

#include <ostream>
#include <string>
#include <vector>

#include "kcsr/config.hpp"

namespace kcsr {

/// Environment variable that overrides output_dir from a config file.
inline constexpr const char* kOutputDirEnv = "KCSR_OUTPUT_DIR";

void command_evolve(const RunConfig& config, std::ostream& log);
void command_trajectories(const RunConfig& config, std::ostream& log);
void command_scaling(const RunConfig& config, std::ostream& log);
void command_dicke(const RunConfig& config, std::ostream& log);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the invariant suite for the configured model; the report gets one
/// line per check.
std::vector<CheckResult> command_verify(const RunConfig& config, std::ostream& report);

/// Renders every known CSV in `dir` (or the single file `input`) to SVG.
/// Returns the written paths.
std::vector<std::string> command_plot(const std::string& dir, const std::string& input, std::ostream& log);

/// Default sweep sizes of the scaling command.
std::vector<int> default_sweep(EmissionMode mode);

/// Process exit code of an exception family: 1 invariant, 2 config, 3 numerical.
int exit_code_for(const std::exception& error);

}  // namespace kcsr
