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

// Run configuration: a flat `key: value` (or `key = value`) text format.
// Blank lines and lines starting with '#' are ignored. The full key list is
// config_keys(); emit_config() writes every key, so its output parses back
// to the same configuration.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kcsr/lindblad.hpp"
#include "kcsr/operators.hpp"
#include "kcsr/trajectories.hpp"

namespace kcsr {

enum class Engine { master, trajectories };

enum class InitialState { inverted, vacuum, config };

struct RunConfig {
  EmissionMode mode = EmissionMode::kc;
  ChainParams params;
  /// Unset means prefactor * delta^3, filled in when mode is dicke.
  std::optional<double> dicke_rate;
  Engine engine = Engine::master;
  EvolutionConfig evolution;
  /// t_max is shared with `evolution`.
  TrajectoryConfig trajectory{.t_max = 10.0};
  InitialState initial = InitialState::inverted;
  std::string initial_config;  ///< bit string, used when initial == config
  std::string output_dir = "kcsr_out";
  std::vector<std::string> artifacts{"timeseries", "momentum", "entropy_hist", "burst", "scaling_sweep", "svg_plots"};
  std::vector<int> sweep;

  bool wants(const std::string& artifact) const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every accepted key, in emit order.
const std::vector<ConfigKey>& config_keys();

/// Artifact names accepted by the `artifacts` key.
const std::vector<std::string>& artifact_names();

/// Assigns one key from its textual value. Throws ConfigError on an unknown
/// key or a malformed value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Range checks across fields. Returns the offending key and message, if any.
struct ConfigIssue {
  std::string key;
  std::string message;
};
std::optional<ConfigIssue> check_config(const RunConfig& config);

struct ParsedConfig {
  RunConfig config;
  std::vector<std::string> notices;  ///< defaults filled in during resolution
  std::map<std::string, int> lines;  ///< line on which each key was set
};

/// Parses the text format. `source` names the input in error messages,
/// which carry the line number: "<source>:<line>: <message>". With
/// `resolve` off, derived defaults and range checks are left to a later
/// resolve_config() call (flags may still override values).
ParsedConfig parse_config(const std::string& text, const std::string& source = "config", bool resolve = true);
ParsedConfig parse_config_file(const std::string& path, bool resolve = true);

/// Fills derived defaults (dicke_rate) and validates. Notices are appended.
void resolve_config(RunConfig& config, std::vector<std::string>& notices);

std::string emit_config(const RunConfig& config);

/// Model selected by mode and params.
Model build_model(const RunConfig& config);

/// Initial pure state selected by `initial`.
PureState build_initial_state(const RunConfig& config);

std::string to_string(EmissionMode mode);
std::string to_string(Engine engine);

/// 17 significant digits with a '.' separator; non-finite values print as nan, inf, -inf.
std::string format_double(double value);

}  // namespace kcsr
