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

#include "kcsr/io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kcsr/config.hpp"

namespace kcsr {

namespace {

constexpr double kRatioFloor = 1e-9;

double parse_cell(const std::string& cell, const std::string& where) {
  if (cell == "nan" || cell == "NaN") return kNaN;
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(where + "invalid number '" + cell + "'");
  return value;
}

}  // namespace

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("csv: no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (table.header.empty()) {
      table.header = cells;
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (cells.size() != table.header.size()) throw ConfigError(where + "column count mismatch");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_cell(c, where));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ConfigError(source + ": empty csv");
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path), path); }

std::vector<std::string> timeseries_header(int n_sites) {
  std::vector<std::string> h{"t", "t_gamma0", "t_gamma1", "t_gamma2", "n", "I_0", "I_1", "I_2", "I_total"};
  for (int m = 0; m < n_sites; ++m) h.push_back("nk_ratio_" + std::to_string(m));
  return h;
}

CsvTable timeseries_table(const std::vector<ObservableRecord>& series, const ChainParams& params) {
  CsvTable table;
  table.header = timeseries_header(params.n_sites);
  for (const auto& r : series) {
    std::vector<double> row{r.time,
                            r.time * params.channel_rate(0),
                            r.time * params.channel_rate(1),
                            r.time * params.channel_rate(2),
                            r.n_total,
                            r.intensity[0],
                            r.intensity[1],
                            r.intensity[2],
                            r.intensity_total};
    for (int m = 0; m < params.n_sites; ++m) {
      const double nk = static_cast<std::size_t>(m) < r.momentum_occ.size() ? r.momentum_occ[static_cast<std::size_t>(m)] : kNaN;
      row.push_back(r.n_total < kRatioFloor ? kNaN : nk / r.n_total);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable observable_table(const std::vector<ObservableRecord>& series, int n_sites) {
  CsvTable table;
  table.header = {"t", "n", "I_0", "I_1", "I_2", "I_total", "S_half"};
  for (int m = 0; m < n_sites; ++m) table.header.push_back("nk_" + std::to_string(m));
  for (const auto& r : series) {
    std::vector<double> row{r.time,         r.n_total,         r.intensity[0],      r.intensity[1],
                            r.intensity[2], r.intensity_total, r.entropy_halfchain};
    for (int m = 0; m < n_sites; ++m) {
      row.push_back(static_cast<std::size_t>(m) < r.momentum_occ.size() ? r.momentum_occ[static_cast<std::size_t>(m)] : kNaN);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable momentum_table(const std::vector<ObservableRecord>& series, int n_sites) {
  CsvTable table;
  table.header = {"t", "n"};
  for (int m = 0; m < n_sites; ++m) table.header.push_back("nk_" + std::to_string(m));
  for (const auto& r : series) {
    std::vector<double> row{r.time, r.n_total};
    for (int m = 0; m < n_sites; ++m) {
      row.push_back(static_cast<std::size_t>(m) < r.momentum_occ.size() ? r.momentum_occ[static_cast<std::size_t>(m)] : kNaN);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable entropy_table(const std::vector<ObservableRecord>& mean, const std::vector<ObservableRecord>& std_error) {
  CsvTable table;
  table.header = {"t", "S_mean", "S_stderr"};
  for (std::size_t i = 0; i < mean.size(); ++i) {
    table.rows.push_back({mean[i].time, mean[i].entropy_halfchain, std_error[i].entropy_halfchain});
  }
  return table;
}

CsvTable trajectory_entropy_table(const std::vector<TrajectoryRecord>& records) {
  CsvTable table;
  table.header = {"t"};
  for (const auto& r : records) table.header.push_back("traj_" + std::to_string(r.traj_index));
  if (records.empty()) return table;
  for (std::size_t i = 0; i < records.front().series.size(); ++i) {
    std::vector<double> row{records.front().series[i].time};
    for (const auto& r : records) row.push_back(r.series[i].entropy_halfchain);
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable jump_table(const std::vector<TrajectoryRecord>& records) {
  CsvTable table;
  table.header = {"traj", "time", "channel", "pre_norm"};
  for (const auto& r : records) {
    for (const auto& e : r.events) {
      table.rows.push_back({static_cast<double>(r.traj_index), e.time, static_cast<double>(e.channel), e.pre_norm});
    }
  }
  return table;
}

CsvTable histogram_table(const Histogram& hist) {
  CsvTable table;
  table.header = {"bin_lo", "bin_hi", "count"};
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    table.rows.push_back({hist.edges[b], hist.edges[b + 1], static_cast<double>(hist.counts[b])});
  }
  return table;
}

CsvTable ladder_table(const LadderSeries& series) {
  CsvTable table;
  table.header = {"t", "n", "I"};
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    table.rows.push_back({series.times[i], series.excitations[i], series.intensity[i]});
  }
  return table;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw ConfigError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace kcsr
