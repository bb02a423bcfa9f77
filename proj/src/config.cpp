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

#include "kcsr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kcsr {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("invalid number '" + text + "' for " + key);
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& text) {
  Int value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError("invalid integer '" + text + "' for " + key);
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_integer<int>(key, item));
      continue;
    }
    const int lo = parse_integer<int>(key, trim(item.substr(0, dots)));
    const int hi = parse_integer<int>(key, trim(item.substr(dots + 2)));
    if (hi < lo) throw ConfigError("empty range '" + item + "' for " + key);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

struct Field {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define KCSR_DOUBLE_FIELD(name, help, member)                                                         \
  Field {                                                                                             \
    {name, help}, [](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); },      \
        [](const RunConfig& c) { return format_double(c.member); }                                    \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {{"mode", "emission model: kc or dicke"},
       [](RunConfig& c, const std::string& v) {
         if (v == "kc") c.mode = EmissionMode::kc;
         else if (v == "dicke") c.mode = EmissionMode::dicke;
         else throw ConfigError("mode must be kc or dicke, got '" + v + "'");
       },
       [](const RunConfig& c) { return to_string(c.mode); }},
      {{"N", "number of sites"},
       [](RunConfig& c, const std::string& v) { c.params.n_sites = parse_integer<int>("N", v); },
       [](const RunConfig& c) { return std::to_string(c.params.n_sites); }},
      KCSR_DOUBLE_FIELD("delta", "bare transition frequency", params.delta),
      KCSR_DOUBLE_FIELD("j_int", "nearest-neighbour interaction J", params.j_int),
      KCSR_DOUBLE_FIELD("gamma", "rate prefactor, gamma_xi = gamma * (delta + xi J)^3", params.gamma_prefactor),
      {{"dicke_rate", "collective rate in dicke mode, or auto for gamma * delta^3"},
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") c.dicke_rate.reset();
         else c.dicke_rate = parse_double("dicke_rate", v);
       },
       [](const RunConfig& c) { return c.dicke_rate ? format_double(*c.dicke_rate) : std::string("auto"); }},
      {{"engine", "master or trajectories"},
       [](RunConfig& c, const std::string& v) {
         if (v == "master") c.engine = Engine::master;
         else if (v == "trajectories") c.engine = Engine::trajectories;
         else throw ConfigError("engine must be master or trajectories, got '" + v + "'");
       },
       [](const RunConfig& c) { return to_string(c.engine); }},
      {{"initial", "initial state: inverted, vacuum, or a configuration such as 1100"},
       [](RunConfig& c, const std::string& v) {
         if (v == "inverted") {
           c.initial = InitialState::inverted;
           c.initial_config.clear();
         } else if (v == "vacuum") {
           c.initial = InitialState::vacuum;
           c.initial_config.clear();
         } else {
           parse_config_string(v);
           c.initial = InitialState::config;
           c.initial_config = v;
         }
       },
       [](const RunConfig& c) {
         switch (c.initial) {
           case InitialState::inverted:
             return std::string("inverted");
           case InitialState::vacuum:
             return std::string("vacuum");
           case InitialState::config:
             break;
         }
         return c.initial_config;
       }},
      {{"t_max", "final time (both engines)"},
       [](RunConfig& c, const std::string& v) {
         c.evolution.t_max = parse_double("t_max", v);
         c.trajectory.t_max = c.evolution.t_max;
       },
       [](const RunConfig& c) { return format_double(c.evolution.t_max); }},
      KCSR_DOUBLE_FIELD("dt_initial", "first trial step of the adaptive integrator", evolution.dt_initial),
      KCSR_DOUBLE_FIELD("rel_tol", "relative tolerance of the adaptive integrator", evolution.rel_tol),
      KCSR_DOUBLE_FIELD("abs_tol", "absolute tolerance of the adaptive integrator", evolution.abs_tol),
      KCSR_DOUBLE_FIELD("sample_interval", "master-equation output cadence", evolution.sample_interval),
      KCSR_DOUBLE_FIELD("steady_tol", "steady-state tolerance", evolution.steady_tol),
      {{"steady_window", "consecutive samples required for a steady state"},
       [](RunConfig& c, const std::string& v) { c.evolution.steady_window = parse_integer<int>("steady_window", v); },
       [](const RunConfig& c) { return std::to_string(c.evolution.steady_window); }},
      {{"stop_at_steady", "stop the master equation once steady"},
       [](RunConfig& c, const std::string& v) { c.evolution.stop_at_steady = parse_bool("stop_at_steady", v); },
       [](const RunConfig& c) { return std::string(c.evolution.stop_at_steady ? "true" : "false"); }},
      {{"monitor_positivity", "eigenvalue check at every sample (N <= 8)"},
       [](RunConfig& c, const std::string& v) {
         c.evolution.monitor_positivity = parse_bool("monitor_positivity", v);
       },
       [](const RunConfig& c) { return std::string(c.evolution.monitor_positivity ? "true" : "false"); }},
      KCSR_DOUBLE_FIELD("traj_dt", "trajectory substep, 0 for 1e-3 / max gamma", trajectory.dt),
      {{"master_seed", "64-bit master seed of the trajectory ensemble"},
       [](RunConfig& c, const std::string& v) {
         c.trajectory.master_seed = parse_integer<std::uint64_t>("master_seed", v);
       },
       [](const RunConfig& c) { return std::to_string(c.trajectory.master_seed); }},
      {{"n_traj", "number of trajectories"},
       [](RunConfig& c, const std::string& v) { c.trajectory.n_traj = parse_integer<int>("n_traj", v); },
       [](const RunConfig& c) { return std::to_string(c.trajectory.n_traj); }},
      {{"entropy_cut", "sites kept for the entropy, or half for 0..N/2-1"},
       [](RunConfig& c, const std::string& v) {
         c.trajectory.entropy_cut = v == "half" ? std::vector<int>{} : parse_int_list("entropy_cut", v);
       },
       [](const RunConfig& c) {
         return c.trajectory.entropy_cut.empty() ? std::string("half") : join_ints(c.trajectory.entropy_cut);
       }},
      KCSR_DOUBLE_FIELD("record_cadence", "trajectory output cadence", trajectory.record_cadence),
      KCSR_DOUBLE_FIELD("dark_rate_tol", "relative jump rate below which a trajectory is dark",
                        trajectory.dark_rate_tol),
      {{"hist_bins", "bins of the final-entropy histogram"},
       [](RunConfig& c, const std::string& v) { c.trajectory.hist_bins = parse_integer<int>("hist_bins", v); },
       [](const RunConfig& c) { return std::to_string(c.trajectory.hist_bins); }},
      {{"threads", "worker threads, 0 for all cores"},
       [](RunConfig& c, const std::string& v) { c.trajectory.threads = parse_integer<int>("threads", v); },
       [](const RunConfig& c) { return std::to_string(c.trajectory.threads); }},
      {{"output_dir", "output directory (KCSR_OUTPUT_DIR overrides the file)"},
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw ConfigError("output_dir must not be empty");
         c.output_dir = v;
       },
       [](const RunConfig& c) { return c.output_dir; }},
      {{"artifacts", "comma list of outputs, all, or none"},
       [](RunConfig& c, const std::string& v) {
         if (v == "all") {
           c.artifacts = artifact_names();
           return;
         }
         std::vector<std::string> list = v == "none" ? std::vector<std::string>{} : split_list(v);
         for (const auto& a : list) {
           const auto& known = artifact_names();
           if (std::find(known.begin(), known.end(), a) == known.end()) {
             throw ConfigError("unknown artifact '" + a + "'");
           }
         }
         c.artifacts = std::move(list);
       },
       [](const RunConfig& c) {
         if (c.artifacts.empty()) return std::string("none");
         std::string out;
         for (std::size_t i = 0; i < c.artifacts.size(); ++i) out += (i ? "," : "") + c.artifacts[i];
         return out;
       }},
      {{"sweep", "system sizes for the scaling command, e.g. 4..12 or 4,6,8"},
       [](RunConfig& c, const std::string& v) { c.sweep = v == "none" ? std::vector<int>{} : parse_int_list("sweep", v); },
       [](const RunConfig& c) { return c.sweep.empty() ? std::string("none") : join_ints(c.sweep); }},
  };
  return table;
}

#undef KCSR_DOUBLE_FIELD

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key.name == key) return f;
  }
  throw ConfigError("unknown key '" + key + "'");
}

}  // namespace

bool RunConfig::wants(const std::string& artifact) const {
  return std::find(artifacts.begin(), artifacts.end(), artifact) != artifacts.end();
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

const std::vector<std::string>& artifact_names() {
  static const std::vector<std::string> names{"timeseries", "momentum", "entropy_hist", "burst", "scaling_sweep",
                                              "svg_plots"};
  return names;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_field(key).set(config, value);
}

std::optional<ConfigIssue> check_config(const RunConfig& c) {
  const int n = c.params.n_sites;
  if (n < 3) return ConfigIssue{"N", "N >= 3 required"};
  if (n > 20) return ConfigIssue{"N", "N <= 20 required"};
  if (c.engine == Engine::master && n > kMaxMasterSites) {
    return ConfigIssue{"N", "master engine supports N <= " + std::to_string(kMaxMasterSites)};
  }
  if (!(c.params.delta > 0.0)) return ConfigIssue{"delta", "delta > 0 required"};
  if (!(c.params.j_int >= 0.0)) return ConfigIssue{"j_int", "j_int >= 0 required"};
  if (!(c.params.gamma_prefactor > 0.0)) return ConfigIssue{"gamma", "gamma > 0 required"};
  if (c.dicke_rate && !(*c.dicke_rate > 0.0)) return ConfigIssue{"dicke_rate", "dicke_rate > 0 required"};
  if (c.initial == InitialState::config) {
    if (static_cast<int>(c.initial_config.size()) != n) {
      return ConfigIssue{"initial", "initial configuration must have N = " + std::to_string(n) + " sites"};
    }
  }

  const auto& e = c.evolution;
  if (!(e.t_max >= 0.0)) return ConfigIssue{"t_max", "t_max >= 0 required"};
  if (!(e.dt_initial > 0.0)) return ConfigIssue{"dt_initial", "dt_initial > 0 required"};
  if (!(e.rel_tol > 0.0)) return ConfigIssue{"rel_tol", "rel_tol > 0 required"};
  if (!(e.abs_tol > 0.0)) return ConfigIssue{"abs_tol", "abs_tol > 0 required"};
  if (!(e.sample_interval > 0.0)) return ConfigIssue{"sample_interval", "sample_interval > 0 required"};
  if (e.t_max > 0.0 && e.sample_interval > e.t_max) {
    return ConfigIssue{"sample_interval", "sample_interval <= t_max required"};
  }
  if (!(e.steady_tol > 0.0)) return ConfigIssue{"steady_tol", "steady_tol > 0 required"};
  if (e.steady_window < 1) return ConfigIssue{"steady_window", "steady_window >= 1 required"};

  const auto& t = c.trajectory;
  if (!(t.dt >= 0.0)) return ConfigIssue{"traj_dt", "traj_dt >= 0 required"};
  if (t.n_traj < 1) return ConfigIssue{"n_traj", "n_traj >= 1 required"};
  if (!(t.record_cadence > 0.0)) return ConfigIssue{"record_cadence", "record_cadence > 0 required"};
  if (t.t_max > 0.0 && t.record_cadence > t.t_max) {
    return ConfigIssue{"record_cadence", "record_cadence <= t_max required"};
  }
  if (!(t.dark_rate_tol >= 0.0)) return ConfigIssue{"dark_rate_tol", "dark_rate_tol >= 0 required"};
  if (t.hist_bins < 1) return ConfigIssue{"hist_bins", "hist_bins >= 1 required"};
  if (t.threads < 0) return ConfigIssue{"threads", "threads >= 0 required"};
  std::vector<int> cut = t.entropy_cut;
  std::sort(cut.begin(), cut.end());
  if (std::adjacent_find(cut.begin(), cut.end()) != cut.end()) {
    return ConfigIssue{"entropy_cut", "duplicate site in entropy_cut"};
  }
  if (!cut.empty() && (cut.front() < 0 || cut.back() >= n)) {
    return ConfigIssue{"entropy_cut", "entropy_cut sites must lie in [0, N)"};
  }
  for (int s : c.sweep) {
    if (s < 3) return ConfigIssue{"sweep", "sweep sizes must be >= 3"};
    if (c.mode == EmissionMode::kc && s > kMaxMasterSites) {
      return ConfigIssue{"sweep", "kc sweeps use the master engine and need N <= " + std::to_string(kMaxMasterSites)};
    }
    if (s > 200) return ConfigIssue{"sweep", "sweep sizes must be <= 200"};
  }
  if (c.output_dir.empty()) return ConfigIssue{"output_dir", "output_dir must not be empty"};
  return std::nullopt;
}

namespace {

void fill_defaults(RunConfig& config, std::vector<std::string>& notices) {
  if (config.mode == EmissionMode::dicke && !config.dicke_rate) {
    config.dicke_rate = default_dicke_rate(config.params);
    notices.push_back("dicke_rate not set; using gamma * delta^3 = " + format_double(*config.dicke_rate));
  }
}

}  // namespace

void resolve_config(RunConfig& config, std::vector<std::string>& notices) {
  fill_defaults(config, notices);
  if (auto issue = check_config(config)) throw ConfigError(issue->key + ": " + issue->message);
}

ParsedConfig parse_config(const std::string& text, const std::string& source, bool resolve) {
  ParsedConfig out;
  auto& seen = out.lines;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto sep = body.find_first_of(":=");
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (sep == std::string::npos) throw ConfigError(where + "expected 'key: value'");
    const std::string key = trim(std::string_view(body).substr(0, sep));
    const std::string value = trim(std::string_view(body).substr(sep + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (seen.count(key)) {
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    try {
      set_config_value(out.config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (!resolve) return out;
  fill_defaults(out.config, out.notices);
  if (auto issue = check_config(out.config)) {
    const auto it = seen.find(issue->key);
    const std::string where = it == seen.end() ? source + ": " : source + ":" + std::to_string(it->second) + ": ";
    throw ConfigError(where + issue->message);
  }
  return out;
}

ParsedConfig parse_config_file(const std::string& path, bool resolve) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path, resolve);
}

std::string emit_config(const RunConfig& config) {
  std::string out = "# kcsr resolved configuration\n";
  for (const auto& f : fields()) out += f.key.name + ": " + f.get(config) + "\n";
  return out;
}

Model build_model(const RunConfig& config) {
  if (config.mode == EmissionMode::kc) return make_kc_model(config.params);
  return make_dicke_model(config.params, config.dicke_rate.value_or(default_dicke_rate(config.params)));
}

PureState build_initial_state(const RunConfig& config) {
  const int n = config.params.n_sites;
  switch (config.initial) {
    case InitialState::inverted:
      return PureState::fully_inverted(n);
    case InitialState::vacuum:
      return PureState::vacuum(n);
    case InitialState::config:
      break;
  }
  return PureState::basis(n, parse_config_string(config.initial_config));
}

std::string to_string(EmissionMode mode) { return mode == EmissionMode::kc ? "kc" : "dicke"; }

std::string to_string(Engine engine) { return engine == Engine::master ? "master" : "trajectories"; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace kcsr
