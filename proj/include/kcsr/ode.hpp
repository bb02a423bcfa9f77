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

// Explicit Runge-Kutta steppers for linear complex systems y' = f(t, y).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>

#include "kcsr/types.hpp"

namespace kcsr {

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double h_initial = 1e-3;
  double h_min = 1e-14;
  std::size_t max_steps = 50'000'000;
};

struct StepCounters {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Dormand-Prince 5(4) with FSAL and a max-norm error estimate
/// err = max_i |e_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)).
///
/// `Rhs` is callable as rhs(t, y, dy). advance() lands exactly on t_end
/// without shrinking the step proposed for the next call.
template <typename Rhs>
class DormandPrince45 {
 public:
  DormandPrince45(Rhs rhs, AdaptiveOptions options) : rhs_(std::move(rhs)), opt_(options), h_(options.h_initial) {}

  void advance(double& t, ComplexVector& y, double t_end) {
    if (t_end <= t) return;
    const Index n = y.size();
    if (k1_.size() != n || !fsal_valid_) {
      resize(n);
      rhs_(t, y, k1_);
      ++counters_.rhs_evaluations;
      fsal_valid_ = true;
    }
    while (t < t_end) {
      if (counters_.accepted + counters_.rejected >= opt_.max_steps) {
        throw NumericalError("step budget exhausted at t = " + std::to_string(t));
      }
      const double remaining = t_end - t;
      const bool last = h_ >= remaining * (1.0 - 1e-12);
      const double h = last ? remaining : h_;

      stage(y, h, {kA21});
      rhs_(t + kC2 * h, tmp_, k2_);
      stage(y, h, {kA31, kA32});
      rhs_(t + kC3 * h, tmp_, k3_);
      stage(y, h, {kA41, kA42, kA43});
      rhs_(t + kC4 * h, tmp_, k4_);
      stage(y, h, {kA51, kA52, kA53, kA54});
      rhs_(t + kC5 * h, tmp_, k5_);
      stage(y, h, {kA61, kA62, kA63, kA64, kA65});
      rhs_(t + h, tmp_, k6_);
      y_new_ = y + h * (kB1 * k1_ + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ + kB6 * k6_);
      rhs_(t + h, y_new_, k7_);
      counters_.rhs_evaluations += 6;

      err_vec_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ + kE7 * k7_);
      double err = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double scale = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y(i)), std::abs(y_new_(i)));
        err = std::max(err, std::abs(err_vec_(i)) / scale);
      }

      if (err <= 1.0) {
        t = last ? t_end : t + h;
        y.swap(y_new_);
        k1_.swap(k7_);
        ++counters_.accepted;
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step clipped to land on t_end says nothing about the natural step size.
        if (!(last && h < h_)) h_ = h * factor;
      } else {
        ++counters_.rejected;
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        if (h_ < opt_.h_min) {
          throw NumericalError("step size underflow (h = " + std::to_string(h_) + ") at t = " +
                               std::to_string(t));
        }
      }
    }
  }

  /// Forget the cached derivative, e.g. after the state was modified externally.
  void reset() { fsal_valid_ = false; }

  const StepCounters& counters() const { return counters_; }
  double step_size() const { return h_; }

 private:
  static constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
  static constexpr double kA21 = 1.0 / 5;
  static constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
  static constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
  static constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                          kA54 = -212.0 / 729;
  static constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                          kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
  static constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                          kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
  static constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                          kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

  void resize(Index n) {
    for (ComplexVector* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_, &err_vec_}) v->resize(n);
  }

  void stage(const ComplexVector& y, double h, std::initializer_list<double> a) {
    const ComplexVector* ks[] = {&k1_, &k2_, &k3_, &k4_, &k5_};
    tmp_ = y;
    std::size_t i = 0;
    for (double coeff : a) tmp_.noalias() += (h * coeff) * *ks[i++];
  }

  Rhs rhs_;
  AdaptiveOptions opt_;
  double h_;
  bool fsal_valid_ = false;
  StepCounters counters_;
  ComplexVector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_vec_;
};

/// Classical fourth-order step for an autonomous linear system y' = f(y).
/// `work` holds scratch vectors and must outlive the call.
struct Rk4Workspace {
  ComplexVector k, acc, tmp;
};

template <typename Apply>
void rk4_step(const Apply& f, ComplexVector& y, double h, Rk4Workspace& w) {
  w.k.resize(y.size());
  f(y, w.k);
  w.acc = y + (h / 6.0) * w.k;
  w.tmp = y + (h / 2.0) * w.k;
  f(w.tmp, w.k);
  w.acc.noalias() += (h / 3.0) * w.k;
  w.tmp = y + (h / 2.0) * w.k;
  f(w.tmp, w.k);
  w.acc.noalias() += (h / 3.0) * w.k;
  w.tmp = y + h * w.k;
  f(w.tmp, w.k);
  w.acc.noalias() += (h / 6.0) * w.k;
  y.swap(w.acc);
}

}  // namespace kcsr
