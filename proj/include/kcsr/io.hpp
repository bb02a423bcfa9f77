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

// CSV artifacts. Numbers use 17 significant digits, '.' as the decimal
// separator and '\n' line endings; NaN prints as "nan".

#include <string>
#include <vector>

#include "kcsr/analysis.hpp"
#include "kcsr/observables.hpp"
#include "kcsr/operators.hpp"
#include "kcsr/trajectories.hpp"

namespace kcsr {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column by name; throws ConfigError when absent.
  std::vector<double> column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text, const std::string& source = "csv");
CsvTable read_csv(const std::string& path);

/// t, t_gamma0, t_gamma1, t_gamma2, n, I_0, I_1, I_2, I_total, nk_ratio_0 .. nk_ratio_{N-1}.
std::vector<std::string> timeseries_header(int n_sites);

/// t, n, I_0, I_1, I_2, I_total, S_half, nk_0 .. nk_{N-1}: every record field.
CsvTable observable_table(const std::vector<ObservableRecord>& series, int n_sites);

/// nk ratios are NaN where n < 1e-9.
CsvTable timeseries_table(const std::vector<ObservableRecord>& series, const ChainParams& params);

/// t, n, nk_0 .. nk_{N-1}.
CsvTable momentum_table(const std::vector<ObservableRecord>& series, int n_sites);

/// t, S_mean, S_stderr from ensemble statistics.
CsvTable entropy_table(const std::vector<ObservableRecord>& mean, const std::vector<ObservableRecord>& std_error);

/// t, then one S column per trajectory (traj_<index>).
CsvTable trajectory_entropy_table(const std::vector<TrajectoryRecord>& records);

/// traj, time, channel, pre_norm.
CsvTable jump_table(const std::vector<TrajectoryRecord>& records);

/// bin_lo, bin_hi, count.
CsvTable histogram_table(const Histogram& hist);

/// t, n, I.
CsvTable ladder_table(const LadderSeries& series);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace kcsr
