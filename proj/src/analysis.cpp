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

#include "kcsr/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace kcsr {

namespace {

double interpolate_crossing(double t0, double y0, double t1, double y1, double level) {
  if (y1 == y0) return t0;
  return t0 + (level - y0) * (t1 - t0) / (y1 - y0);
}

Eigen::MatrixXd ladder_generator(int n_sites, double gamma) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_sites + 1, n_sites + 1);
  for (int k = 1; k <= n_sites; ++k) {
    const double r = dicke_ladder_rate(n_sites, k, gamma);
    q(k, k) = -r;
    q(k - 1, k) = r;
  }
  return q;
}

void append_ladder_point(LadderSeries& out, int n_sites, double gamma, double t, const Eigen::VectorXd& pop) {
  double intensity = 0.0;
  double excitations = 0.0;
  for (int k = 1; k <= n_sites; ++k) {
    intensity += pop(k) * dicke_ladder_rate(n_sites, k, gamma);
    excitations += k * pop(k);
  }
  out.times.push_back(t);
  out.intensity.push_back(intensity);
  out.excitations.push_back(excitations);
}

double r_squared(const std::vector<double>& y, const std::vector<double>& residuals) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += residuals[i] * residuals[i];
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

BurstFeatures extract_burst(const std::vector<double>& times, const std::vector<double>& intensity) {
  if (times.size() != intensity.size()) throw ConfigError("extract_burst: length mismatch");
  if (times.size() < 10) throw ConfigError("extract_burst: at least 10 samples required");
  const std::size_t last = times.size() - 1;
  const auto peak = static_cast<std::size_t>(std::max_element(intensity.begin(), intensity.end()) - intensity.begin());

  BurstFeatures f;
  f.peak_index = peak;
  f.i_max = intensity[peak];
  f.t_peak = times[peak];
  f.interior_peak = peak > 0 && peak < last;
  if (f.interior_peak) {
    // Parabola through the three samples, with time measured from the middle one.
    const double x0 = times[peak - 1] - times[peak];
    const double x2 = times[peak + 1] - times[peak];
    const double y0 = intensity[peak - 1];
    const double y1 = intensity[peak];
    const double y2 = intensity[peak + 1];
    const double d0 = (y0 - y1) / x0;
    const double d2 = (y2 - y1) / x2;
    const double a = (d2 - d0) / (x2 - x0);
    const double b = d0 - a * x0;
    if (a < 0.0) {
      const double xv = -b / (2.0 * a);
      f.t_peak = times[peak] + xv;
      f.i_max = y1 + b * xv + a * xv * xv;
    }
  }
  f.t_delay = f.t_peak;

  const double half = 0.5 * f.i_max;
  double t_left = times.front();
  f.left_truncated = true;
  for (std::size_t j = peak; j-- > 0;) {
    if (intensity[j] < half) {
      t_left = interpolate_crossing(times[j], intensity[j], times[j + 1], intensity[j + 1], half);
      f.left_truncated = false;
      break;
    }
  }
  double t_right = times.back();
  f.right_truncated = true;
  for (std::size_t j = peak + 1; j <= last; ++j) {
    if (intensity[j] < half) {
      t_right = interpolate_crossing(times[j - 1], intensity[j - 1], times[j], intensity[j], half);
      f.right_truncated = false;
      break;
    }
  }
  f.width = t_right - t_left;
  return f;
}

double dicke_ladder_rate(int n_sites, int excitations, double gamma) {
  // With J = N/2 and M = k - J: (J + M)(J - M + 1) = k (N - k + 1).
  return gamma * excitations * (n_sites - excitations + 1);
}

LadderSeries dicke_ladder_reference(int n_sites, double gamma, const std::vector<double>& times) {
  if (n_sites < 1) throw ConfigError("dicke ladder: N >= 1 required");
  if (!(gamma > 0.0)) throw ConfigError("dicke ladder: gamma > 0 required");
  const Eigen::MatrixXd q = ladder_generator(n_sites, gamma);
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n_sites + 1);
  p0(n_sites) = 1.0;
  LadderSeries out;
  for (double t : times) {
    const Eigen::MatrixXd u = (q * t).exp();
    append_ladder_point(out, n_sites, gamma, t, u * p0);
  }
  return out;
}

LadderSeries dicke_ladder_reference(int n_sites, double gamma, double t_max, double dt) {
  if (n_sites < 1) throw ConfigError("dicke ladder: N >= 1 required");
  if (!(gamma > 0.0)) throw ConfigError("dicke ladder: gamma > 0 required");
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw ConfigError("dicke ladder: dt > 0 and t_max >= 0 required");
  const Eigen::MatrixXd q = ladder_generator(n_sites, gamma);
  const Eigen::MatrixXd step = (q * dt).exp();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n_sites + 1);
  p(n_sites) = 1.0;
  const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  LadderSeries out;
  for (std::size_t i = 0; i <= count; ++i) {
    if (i > 0) p = step * p;
    append_ladder_point(out, n_sites, gamma, static_cast<double>(i) * dt, p);
  }
  return out;
}

std::string to_string(ScalingModel model) {
  switch (model) {
    case ScalingModel::power_law:
      return "power_law";
    case ScalingModel::log_over_n:
      return "log_over_n";
    case ScalingModel::inverse_n:
      return "inverse_n";
  }
  return "unknown";
}

ScalingModel parse_scaling_model(const std::string& name) {
  if (name == "power_law") return ScalingModel::power_law;
  if (name == "log_over_n") return ScalingModel::log_over_n;
  if (name == "inverse_n") return ScalingModel::inverse_n;
  throw ConfigError("unknown scaling model '" + name + "'");
}

ScalingFit fit_scaling(const std::vector<double>& sizes, const std::vector<double>& values, ScalingModel model) {
  if (sizes.size() != values.size()) throw ConfigError("fit_scaling: length mismatch");
  if (sizes.size() < 3) throw ConfigError("fit_scaling: at least 3 points required");
  for (double n : sizes) {
    if (!(n > 0.0)) throw ConfigError("fit_scaling: sizes must be positive");
  }
  ScalingFit fit;
  fit.model = model;
  const std::size_t m = sizes.size();
  if (model == ScalingModel::power_law) {
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(values[i] > 0.0)) throw ConfigError("fit_scaling: power_law needs positive values");
      x[i] = std::log(sizes[i]);
      y[i] = std::log(values[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += x[i];
      my += y[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_scaling: sizes must not all coincide");
    fit.b = sxy / sxx;
    const double ln_a = my - fit.b * mx;
    fit.a = std::exp(ln_a);
    for (std::size_t i = 0; i < m; ++i) fit.residuals.push_back(y[i] - (ln_a + fit.b * x[i]));
    fit.r_squared = r_squared(y, fit.residuals);
    return fit;
  }
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = model == ScalingModel::log_over_n ? std::log(sizes[i]) / sizes[i] : 1.0 / sizes[i];
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * values[i];
  }
  if (sxx == 0.0) throw ConfigError("fit_scaling: degenerate regressor");
  fit.a = sxy / sxx;
  for (std::size_t i = 0; i < m; ++i) fit.residuals.push_back(values[i] - fit.a * x[i]);
  fit.r_squared = r_squared(values, fit.residuals);
  return fit;
}

DickeScaling dicke_scaling(const std::vector<int>& sizes, double gamma, double t_max, double dt) {
  DickeScaling out;
  std::vector<double> ns, peaks, widths, delays;
  for (int n : sizes) {
    const LadderSeries series = dicke_ladder_reference(n, gamma, t_max, dt);
    const BurstFeatures f = extract_burst(series.times, series.intensity);
    out.sizes.push_back(n);
    out.features.push_back(f);
    ns.push_back(n);
    peaks.push_back(f.i_max);
    widths.push_back(f.width);
    delays.push_back(f.t_delay);
  }
  out.peak_fit = fit_scaling(ns, peaks, ScalingModel::power_law);
  out.width_fit = fit_scaling(ns, widths, ScalingModel::power_law);
  out.delay_fit = fit_scaling(ns, delays, ScalingModel::log_over_n);
  return out;
}

SteadySummary steady_state_summary(const MasterRun& run, int n_sites) {
  if (run.samples.empty()) throw ConfigError("steady_state_summary: empty run");
  SteadySummary s;
  s.n_sites = n_sites;
  s.density = run.samples.back().obs.n_total / n_sites;
  s.steady_reached = run.steady.reached;
  return s;
}

SteadySummary steady_state_summary(const EnsembleResult& ensemble, int n_sites) {
  if (ensemble.final_n.empty()) throw ConfigError("steady_state_summary: empty ensemble");
  SteadySummary s;
  s.n_sites = n_sites;
  double n = 0.0;
  for (double v : ensemble.final_n) n += v;
  s.density = n / static_cast<double>(ensemble.final_n.size()) / n_sites;
  s.entropy_mean = ensemble.mean_final_entropy;
  s.trivial_fraction = ensemble.trivial_fraction;
  s.steady_reached = ensemble.dark_count == ensemble.final_n.size();
  return s;
}

Plateau detect_plateau(const std::vector<double>& times, const std::vector<double>& intensity_total,
                       const std::vector<double>& intensity_xi2, double gamma0, double gamma1) {
  const std::size_t m = times.size();
  if (intensity_total.size() != m || intensity_xi2.size() != m) throw ConfigError("detect_plateau: length mismatch");
  if (m < 3) throw ConfigError("detect_plateau: at least 3 samples required");
  Plateau out;
  const double i_peak = *std::max_element(intensity_total.begin(), intensity_total.end());
  out.threshold = 0.05 * i_peak * gamma0;
  out.min_width = 1.0 / gamma1;

  const auto peak2 = static_cast<std::size_t>(std::max_element(intensity_xi2.begin(), intensity_xi2.end()) -
                                              intensity_xi2.begin());
  const double half2 = 0.5 * intensity_xi2[peak2];
  std::size_t begin = peak2;
  while (begin < m && intensity_xi2[begin] >= half2) ++begin;
  if (begin >= m) return out;
  const double floor_level = 1e-2 * intensity_total[begin];
  std::size_t end = begin;
  while (end + 1 < m && intensity_total[end + 1] >= floor_level) ++end;
  out.search_begin = times[begin];
  out.search_end = times[end];

  std::size_t run_start = 0;
  bool in_run = false;
  for (std::size_t i = std::max<std::size_t>(begin, 1); i <= std::min(end, m - 2); ++i) {
    const double slope = (intensity_total[i + 1] - intensity_total[i - 1]) / (times[i + 1] - times[i - 1]);
    const bool flat = std::abs(slope) < out.threshold;
    if (flat && !in_run) {
      run_start = i;
      in_run = true;
    }
    if (in_run && (!flat || i == std::min(end, m - 2))) {
      const std::size_t run_end = flat ? i : i - 1;
      const double width = times[run_end] - times[run_start];
      if (width > out.width) {
        out.width = width;
        out.t_start = times[run_start];
        out.t_end = times[run_end];
      }
      in_run = false;
    }
  }
  out.found = out.width >= out.min_width;
  return out;
}

double balance_law_error(const std::vector<double>& times, const std::vector<double>& n,
                         const std::vector<double>& intensity, double floor) {
  const std::size_t m = times.size();
  if (n.size() != m || intensity.size() != m) throw ConfigError("balance_law_error: length mismatch");
  if (m < 5) throw ConfigError("balance_law_error: at least 5 samples required");
  const double h = times[1] - times[0];
  for (std::size_t i = 1; i < m; ++i) {
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
      throw ConfigError("balance_law_error: uniform grid required");
    }
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    double dn = 0.0;
    if (i >= 2 && i + 2 < m) {
      dn = (n[i - 2] - 8.0 * n[i - 1] + 8.0 * n[i + 1] - n[i + 2]) / (12.0 * h);
    } else if (i == 1) {
      dn = (-3.0 * n[0] - 10.0 * n[1] + 18.0 * n[2] - 6.0 * n[3] + n[4]) / (12.0 * h);
    } else {
      dn = (3.0 * n[i + 1] + 10.0 * n[i] - 18.0 * n[i - 1] + 6.0 * n[i - 2] - n[i - 3]) / (12.0 * h);
    }
    worst = std::max(worst, std::abs(dn + intensity[i]) / std::max(intensity[i], floor));
  }
  return worst;
}

std::vector<double> series_times(const std::vector<ObservableRecord>& series) {
  std::vector<double> out;
  for (const auto& r : series) out.push_back(r.time);
  return out;
}

std::vector<double> series_intensity(const std::vector<ObservableRecord>& series, int xi) {
  if (xi < 0 || xi > 2) throw ConfigError("series_intensity: xi must be 0, 1 or 2");
  std::vector<double> out;
  for (const auto& r : series) out.push_back(r.intensity[static_cast<std::size_t>(xi)]);
  return out;
}

std::vector<double> series_total_intensity(const std::vector<ObservableRecord>& series) {
  std::vector<double> out;
  for (const auto& r : series) out.push_back(r.intensity_total);
  return out;
}

std::array<double, 3> channel_peak_times(const std::vector<ObservableRecord>& series) {
  const std::vector<double> t = series_times(series);
  std::array<double, 3> out{};
  for (int xi = 0; xi < 3; ++xi) out[static_cast<std::size_t>(xi)] = extract_burst(t, series_intensity(series, xi)).t_peak;
  return out;
}

}  // namespace kcsr
