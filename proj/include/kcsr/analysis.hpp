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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "kcsr/lindblad.hpp"
#include "kcsr/observables.hpp"
#include "kcsr/trajectories.hpp"

namespace kcsr {

struct BurstFeatures {
  double i_max = 0.0;
  double t_peak = 0.0;
  double width = kNaN;  ///< FWHM
  double t_delay = 0.0; ///< same as t_peak
  std::size_t peak_index = 0;
  bool interior_peak = false;   ///< false for a maximum on the first or last sample
  bool left_truncated = false;  ///< no half-maximum crossing before the peak; the first sample is used
  bool right_truncated = false; ///< no crossing after the peak; the last sample is used

  bool flagged() const { return !interior_peak || left_truncated || right_truncated; }
};

/// Peak and width of a sampled intensity curve. The maximum is refined by a
/// parabola through the three samples around it; half-maximum crossings are
/// linearly interpolated. Needs at least 10 samples.
BurstFeatures extract_burst(const std::vector<double>& times, const std::vector<double>& intensity);

struct LadderSeries {
  std::vector<double> times;
  std::vector<double> intensity;
  std::vector<double> excitations;
};

/// Rate cascade on the symmetric ladder |J = N/2, M> started at M = J, with
/// downward rate gamma (J + M)(J - M + 1). Propagated with the matrix
/// exponential of the (N + 1)-level generator at every requested time.
LadderSeries dicke_ladder_reference(int n_sites, double gamma, const std::vector<double>& times);

/// Same on the uniform grid 0, dt, ..., t_max.
LadderSeries dicke_ladder_reference(int n_sites, double gamma, double t_max, double dt);

/// gamma (J + M)(J - M + 1) for a ladder state with k = J + M excitations.
double dicke_ladder_rate(int n_sites, int excitations, double gamma);

enum class ScalingModel { power_law, log_over_n, inverse_n };

std::string to_string(ScalingModel model);
ScalingModel parse_scaling_model(const std::string& name);

struct ScalingFit {
  ScalingModel model = ScalingModel::power_law;
  double a = 0.0;
  double b = kNaN;  ///< exponent, power_law only
  double r_squared = 0.0;
  /// Residuals in the fitted space: ln v - ln(a N^b) for power_law, v - model otherwise.
  std::vector<double> residuals;
};

/// power_law: least squares of ln v on ln N. log_over_n and inverse_n:
/// single-parameter least squares through the origin on the transformed
/// regressor. r^2 = 1 - SS_res / SS_tot in the fitted space and may be negative.
ScalingFit fit_scaling(const std::vector<double>& sizes, const std::vector<double>& values, ScalingModel model);

struct DickeScaling {
  std::vector<int> sizes;
  std::vector<BurstFeatures> features;
  ScalingFit peak_fit;   ///< I_max vs N, power law
  ScalingFit width_fit;  ///< FWHM vs N, power law
  ScalingFit delay_fit;  ///< t_peak vs N, a ln N / N
};

/// Ladder bursts over `sizes` on a grid of `dt` up to `t_max`, then fits.
DickeScaling dicke_scaling(const std::vector<int>& sizes, double gamma, double t_max, double dt);

struct SteadySummary {
  int n_sites = 0;
  double density = 0.0;  ///< <n> / N at the final time
  double entropy_mean = kNaN;
  double trivial_fraction = kNaN;
  bool steady_reached = false;
};

SteadySummary steady_state_summary(const MasterRun& run, int n_sites);
SteadySummary steady_state_summary(const EnsembleResult& ensemble, int n_sites);

struct Plateau {
  bool found = false;
  double t_start = kNaN;
  double t_end = kNaN;
  double width = 0.0;
  double threshold = 0.0;   ///< 0.05 I_peak gamma_0
  double min_width = 0.0;   ///< 1 / gamma_1
  double search_begin = kNaN;
  double search_end = kNaN;
};

/// Plateau of I_total between the xi = 2 burst and the final decay.
///
/// The search window opens once I_2 has dropped below half its maximum after
/// the peak and closes when I_total falls below 1% of its value at that
/// opening time. Inside it, the longest run of samples with centered
/// |dI/dt| < 0.05 I_peak gamma_0 is reported; it counts as a plateau when it
/// spans at least 1 / gamma_1.
Plateau detect_plateau(const std::vector<double>& times, const std::vector<double>& intensity_total,
                       const std::vector<double>& intensity_xi2, double gamma0, double gamma1);

/// Largest |dn/dt + I| / max(I, floor) over the interior samples of a uniform
/// grid. dn/dt uses fourth-order stencils: centered where two neighbours exist
/// on each side, the shifted five-point form next to the ends.
double balance_law_error(const std::vector<double>& times, const std::vector<double>& n,
                         const std::vector<double>& intensity, double floor);

/// Burst peak times of I_0, I_1, I_2 from a record series.
std::array<double, 3> channel_peak_times(const std::vector<ObservableRecord>& series);

/// Column of a record series.
std::vector<double> series_times(const std::vector<ObservableRecord>& series);
std::vector<double> series_intensity(const std::vector<ObservableRecord>& series, int xi);
std::vector<double> series_total_intensity(const std::vector<ObservableRecord>& series);

}  // namespace kcsr
