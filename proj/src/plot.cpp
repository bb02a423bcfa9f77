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

#include "kcsr/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "kcsr/types.hpp"

namespace kcsr {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double fraction(double v) const { return (transform(v) - lo) / (hi - lo); }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis a;
  a.log = log;
  if (!(lo <= hi)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  a.lo = a.transform(lo);
  a.hi = a.transform(hi);
  if (a.hi - a.lo < 1e-300) {
    a.lo -= 0.5;
    a.hi += 0.5;
  }
  return a;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

std::string frame(const PlotOptions& o, const Axis& x, const Axis& y) {
  const double w = o.width - kMarginLeft - kMarginRight;
  const double h = o.height - kMarginTop - kMarginBottom;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
                  std::to_string(o.height) + "\" viewBox=\"0 0 " + std::to_string(o.width) + " " +
                  std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double px = kMarginLeft + f * w;
    const double py = kMarginTop + h - f * h;
    const double xv = x.lo + f * (x.hi - x.lo);
    const double yv = y.lo + f * (y.hi - y.lo);
    s += "<line x1=\"" + num(px) + "\" y1=\"" + num(kMarginTop + h) + "\" x2=\"" + num(px) + "\" y2=\"" +
         num(kMarginTop + h + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(px) + "\" y=\"" + num(kMarginTop + h + 18) + "\" text-anchor=\"middle\">" +
         tick_label(x.log ? std::pow(10.0, xv) : xv) + "</text>\n";
    s += "<line x1=\"" + num(kMarginLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kMarginLeft) + "\" y2=\"" +
         num(py) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kMarginLeft - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" +
         tick_label(y.log ? std::pow(10.0, yv) : yv) + "</text>\n";
  }
  s += "<text x=\"" + num(o.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(o.title) +
       "</text>\n";
  s += "<text x=\"" + num(kMarginLeft + w / 2) + "\" y=\"" + num(o.height - 10.0) + "\" text-anchor=\"middle\">" +
       escape(o.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(kMarginTop + h / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(o.y_label) + "</text>\n";
  return s;
}

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& sr : series) {
    if (sr.x.size() != sr.y.size()) throw ConfigError("plot: series '" + sr.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (!usable(sr.x[i], options.log_x) || !usable(sr.y[i], options.log_y)) continue;
      xlo = std::min(xlo, sr.x[i]);
      xhi = std::max(xhi, sr.x[i]);
      ylo = std::min(ylo, sr.y[i]);
      yhi = std::max(yhi, sr.y[i]);
    }
  }
  const Axis x = make_axis(xlo, xhi, options.log_x);
  const Axis y = make_axis(ylo, yhi, options.log_y);
  const double w = options.width - kMarginLeft - kMarginRight;
  const double h = options.height - kMarginTop - kMarginBottom;
  std::string s = frame(options, x, y);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    std::string markers;
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (!usable(sr.x[i], options.log_x) || !usable(sr.y[i], options.log_y)) continue;
      const double px = kMarginLeft + x.fraction(sr.x[i]) * w;
      const double py = kMarginTop + h - y.fraction(sr.y[i]) * h;
      points += num(px) + "," + num(py) + " ";
      if (options.markers) {
        markers += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    }
    if (!points.empty()) {
      points.pop_back();
      s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    }
    s += markers;
    const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(k);
    const double lx = options.width - kMarginRight + 12.0;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\">" + escape(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string histogram_svg(const std::vector<double>& edges, const std::vector<std::uint64_t>& counts,
                          const PlotOptions& options) {
  if (edges.size() != counts.size() + 1 || counts.empty()) throw ConfigError("plot: histogram needs bins + 1 edges");
  std::uint64_t peak = 1;
  for (auto c : counts) peak = std::max(peak, c);
  const Axis x = make_axis(edges.front(), edges.back(), false);
  const Axis y = make_axis(0.0, static_cast<double>(peak), false);
  const double w = options.width - kMarginLeft - kMarginRight;
  const double h = options.height - kMarginTop - kMarginBottom;
  std::string s = frame(options, x, y);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double x0 = kMarginLeft + x.fraction(edges[b]) * w;
    const double x1 = kMarginLeft + x.fraction(edges[b + 1]) * w;
    const double bar = y.fraction(static_cast<double>(counts[b])) * h;
    s += "<rect x=\"" + num(x0) + "\" y=\"" + num(kMarginTop + h - bar) + "\" width=\"" + num(std::max(x1 - x0, 0.0)) +
         "\" height=\"" + num(bar) + "\" fill=\"" + kPalette[0] + "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace kcsr
