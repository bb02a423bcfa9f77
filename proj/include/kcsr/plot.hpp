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

// Static SVG rendering of line plots and histograms.

#include <cstdint>
#include <string>
#include <vector>

namespace kcsr {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool markers = false;
  int width = 720;
  int height = 440;
};

/// Non-finite points (and non-positive ones on log axes) are skipped.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

std::string histogram_svg(const std::vector<double>& edges, const std::vector<std::uint64_t>& counts,
                          const PlotOptions& options);

}  // namespace kcsr
