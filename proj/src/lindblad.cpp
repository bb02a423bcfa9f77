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

#include "kcsr/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace kcsr {

namespace {

using MatrixMap = Eigen::Map<ComplexMatrix>;
using ConstMatrixMap = Eigen::Map<const ComplexMatrix>;

constexpr double kTraceTolerance = 1e-9;
constexpr double kHermiticityTolerance = 1e-10;
constexpr double kPositivityAbort = -1e-6;
constexpr int kPositivityMaxSites = 8;

std::string at_time(double t) { return " at t = " + std::to_string(t); }

}  // namespace

void EvolutionConfig::validate() const {
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max >= 0 required");
  if (!(dt_initial > 0.0)) throw ConfigError("dt_initial > 0 required");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("rel_tol and abs_tol must be positive");
  if (!(sample_interval > 0.0)) throw ConfigError("sample_interval > 0 required");
  if (t_max > 0.0 && sample_interval > t_max) throw ConfigError("sample_interval <= t_max required");
  if (!(steady_tol > 0.0)) throw ConfigError("steady_tol > 0 required");
  if (steady_window < 1) throw ConfigError("steady_window >= 1 required");
}

ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const SparseOperator& hamiltonian,
                           const std::vector<ChannelSpec>& channels) {
  const Index dim = rho.dim();
  if (hamiltonian.dim() != dim) throw ConfigError("lindblad_rhs: dimension mismatch");
  const SparseMatrix& h = hamiltonian.matrix();
  ComplexMatrix out = (-kI) * (h * rho.data);
  out.noalias() += kI * (rho.data * h);
  for (const auto& ch : channels) {
    if (ch.op.dim() != dim) throw ConfigError("lindblad_rhs: channel dimension mismatch");
    const SparseMatrix& s = ch.op.matrix();
    const SparseMatrix s_adj = s.adjoint();
    const SparseMatrix number = s_adj * s;
    const ComplexMatrix s_rho = s * rho.data;
    out.noalias() += ch.rate * (s_rho * s_adj);
    out.noalias() -= (0.5 * ch.rate) * (number * rho.data);
    out.noalias() -= (0.5 * ch.rate) * (rho.data * number);
  }
  return out;
}

ComplexMatrix dense_liouvillian(const Model& model) {
  const Index d = model.dimension();
  if (model.params.n_sites > 6) throw ConfigError("dense_liouvillian: N <= 6 required");
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X) for column stacking.
  auto kron = [d](const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(d * d, d * d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = a(i, j) * b;
    }
    return out;
  };
  const ComplexMatrix h = model.hamiltonian.to_dense();
  ComplexMatrix l = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& ch : model.channels) {
    const ComplexMatrix s = ch.op.to_dense();
    const ComplexMatrix number = s.adjoint() * s;
    l += ch.rate * (kron(s.conjugate(), s) - 0.5 * kron(id, number) - 0.5 * kron(number.transpose(), id));
  }
  return l;
}

std::vector<int> coherence_orders(const DensityMatrix& rho) {
  const int n = sites_from_dimension(rho.dim());
  std::vector<bool> present(static_cast<std::size_t>(2 * n + 1), false);
  for (Index c = 0; c < rho.dim(); ++c) {
    for (Index r = 0; r < rho.dim(); ++r) {
      if (rho.data(r, c) != Complex(0.0, 0.0)) {
        const int d = excitation_count(static_cast<BasisConfig>(r)) - excitation_count(static_cast<BasisConfig>(c));
        present[static_cast<std::size_t>(d + n)] = true;
      }
    }
  }
  std::vector<int> orders;
  for (int d = -n; d <= n; ++d) {
    if (present[static_cast<std::size_t>(d + n)]) orders.push_back(d);
  }
  return orders;
}

BlockedLiouvillian::BlockedLiouvillian(const Model& model, std::vector<int> orders)
    : mode_(model.mode), channels_(model.channels), layout_(model.params.n_sites), orders_(std::move(orders)) {
  const int n = model.params.n_sites;
  std::sort(orders_.begin(), orders_.end());
  orders_.erase(std::unique(orders_.begin(), orders_.end()), orders_.end());
  if (std::find(orders_.begin(), orders_.end(), 0) == orders_.end()) {
    throw ConfigError("density matrix has no population blocks");
  }

  diagonal_block_.assign(static_cast<std::size_t>(n) + 1, -1);
  for (int d : orders_) {
    for (int p = std::max(0, d); p <= std::min(n, n + d); ++p) {
      const int q = p - d;
      Block b{p, q, packed_size_, -1, -1};
      packed_size_ += layout_.size(p) * layout_.size(q);
      if (p == q) diagonal_block_[static_cast<std::size_t>(p)] = static_cast<int>(blocks_.size());
      blocks_.push_back(b);
    }
  }
  auto find_block = [&](int p, int q) {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].p == p && blocks_[i].q == q) return static_cast<int>(i);
    }
    return -1;
  };
  for (auto& b : blocks_) {
    b.lower = find_block(b.p + 1, b.q + 1);
    b.mirror = find_block(b.q, b.p);
  }

  SparseOperator decay_sum = SparseOperator::from_matrix(SparseMatrix(model.dimension(), model.dimension()));
  for (const auto& ch : model.channels) {
    decay_sum = decay_sum + Complex(ch.rate) * (ch.op.adjoint() * ch.op);
  }
  const SparseOperator heff = model.hamiltonian - Complex(0.0, 0.5) * decay_sum;

  for (int p = 0; p <= n; ++p) {
    heff_.push_back(layout_.block(heff, p, p));
    heff_adj_.push_back(SparseMatrix(heff_.back().adjoint()));
  }
  for (const auto& ch : model.channels) {
    rates_.push_back(ch.rate);
    std::vector<SparseMatrix> down;
    std::vector<SparseMatrix> down_adj;
    for (int p = 0; p < n; ++p) {
      down.push_back(layout_.block(ch.op, p, p + 1));
      down_adj.push_back(SparseMatrix(down.back().adjoint()));
    }
    jumps_.push_back(std::move(down));
    jumps_adj_.push_back(std::move(down_adj));
  }
  for (int m = 0; m < n; ++m) {
    const SparseOperator op = build_momentum_lowering_mode(model.params, m);
    std::vector<SparseMatrix> down;
    for (int p = 0; p < n; ++p) down.push_back(layout_.block(op, p, p + 1));
    momentum_.push_back(std::move(down));
  }
}

ComplexVector BlockedLiouvillian::pack(const DensityMatrix& rho) const {
  if (rho.dim() != layout_.dim()) throw ConfigError("pack: dimension mismatch");
  ComplexVector x(packed_size_);
  for (const auto& b : blocks_) {
    MatrixMap blk(x.data() + b.offset, layout_.size(b.p), layout_.size(b.q));
    const auto rows = layout_.configs(b.p);
    const auto cols = layout_.configs(b.q);
    for (Index j = 0; j < blk.cols(); ++j) {
      for (Index i = 0; i < blk.rows(); ++i) {
        blk(i, j) = rho.data(static_cast<Index>(rows[static_cast<std::size_t>(i)]),
                             static_cast<Index>(cols[static_cast<std::size_t>(j)]));
      }
    }
  }
  return x;
}

DensityMatrix BlockedLiouvillian::unpack(const ComplexVector& x, double time) const {
  DensityMatrix rho;
  rho.time = time;
  rho.data = ComplexMatrix::Zero(layout_.dim(), layout_.dim());
  for (const auto& b : blocks_) {
    ConstMatrixMap blk(x.data() + b.offset, layout_.size(b.p), layout_.size(b.q));
    const auto rows = layout_.configs(b.p);
    const auto cols = layout_.configs(b.q);
    for (Index j = 0; j < blk.cols(); ++j) {
      for (Index i = 0; i < blk.rows(); ++i) {
        rho.data(static_cast<Index>(rows[static_cast<std::size_t>(i)]),
                 static_cast<Index>(cols[static_cast<std::size_t>(j)])) = blk(i, j);
      }
    }
  }
  return rho;
}

void BlockedLiouvillian::apply(const ComplexVector& x, ComplexVector& dx) const {
  dx.resize(packed_size_);
  ComplexMatrix tmp;
  for (const auto& b : blocks_) {
    const Index rp = layout_.size(b.p);
    const Index rq = layout_.size(b.q);
    ConstMatrixMap xb(x.data() + b.offset, rp, rq);
    MatrixMap out(dx.data() + b.offset, rp, rq);
    out.noalias() = heff_[static_cast<std::size_t>(b.p)] * xb;
    out *= -kI;
    tmp.noalias() = xb * heff_adj_[static_cast<std::size_t>(b.q)];
    out.noalias() += kI * tmp;
    if (b.lower < 0) continue;
    const Block& lb = blocks_[static_cast<std::size_t>(b.lower)];
    ConstMatrixMap xl(x.data() + lb.offset, layout_.size(lb.p), layout_.size(lb.q));
    for (std::size_t c = 0; c < rates_.size(); ++c) {
      tmp.noalias() = jumps_[c][static_cast<std::size_t>(b.p)] * xl;
      out.noalias() += rates_[c] * (tmp * jumps_adj_[c][static_cast<std::size_t>(b.q)]);
    }
  }
}

Complex BlockedLiouvillian::trace(const ComplexVector& x) const {
  Complex tr = 0.0;
  for (int p = 0; p < layout_.sector_count(); ++p) {
    const int bi = diagonal_block_[static_cast<std::size_t>(p)];
    const Block& b = blocks_[static_cast<std::size_t>(bi)];
    tr += ConstMatrixMap(x.data() + b.offset, layout_.size(p), layout_.size(p)).trace();
  }
  return tr;
}

double BlockedLiouvillian::hermiticity_error(const ComplexVector& x) const {
  double worst = 0.0;
  for (const auto& b : blocks_) {
    ConstMatrixMap xb(x.data() + b.offset, layout_.size(b.p), layout_.size(b.q));
    if (b.mirror < 0) {
      worst = std::max(worst, xb.cwiseAbs().maxCoeff());
      continue;
    }
    const Block& m = blocks_[static_cast<std::size_t>(b.mirror)];
    ConstMatrixMap xm(x.data() + m.offset, layout_.size(m.p), layout_.size(m.q));
    worst = std::max(worst, (xb - xm.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

double BlockedLiouvillian::min_eigenvalue(const ComplexVector& x) const {
  if (orders_.size() > 1) return unpack(x, 0.0).min_eigenvalue();
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) {
    ConstMatrixMap xb(x.data() + b.offset, layout_.size(b.p), layout_.size(b.q));
    const ComplexMatrix herm = 0.5 * (xb + xb.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    lowest = std::min(lowest, solver.eigenvalues().minCoeff());
  }
  return lowest;
}

double BlockedLiouvillian::lowering_expectation(const ComplexVector& x,
                                                const std::vector<SparseMatrix>& down) const {
  // <A^+ A> = sum_p tr(A_p rho_pp A_p^+); only population blocks contribute.
  Complex acc = 0.0;
  ComplexMatrix t;
  for (int p = 1; p < layout_.sector_count(); ++p) {
    const Block& b = blocks_[static_cast<std::size_t>(diagonal_block_[static_cast<std::size_t>(p)])];
    ConstMatrixMap xb(x.data() + b.offset, layout_.size(p), layout_.size(p));
    const SparseMatrix& a = down[static_cast<std::size_t>(p - 1)];
    t.noalias() = a * xb;
    for (Index r = 0; r < a.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) acc += t(r, it.col()) * std::conj(it.value());
    }
  }
  return acc.real();
}

ObservableRecord BlockedLiouvillian::measure(const ComplexVector& x, double time) const {
  ObservableRecord rec;
  rec.time = time;
  double n = 0.0;
  for (int p = 1; p < layout_.sector_count(); ++p) {
    const Block& b = blocks_[static_cast<std::size_t>(diagonal_block_[static_cast<std::size_t>(p)])];
    n += p * ConstMatrixMap(x.data() + b.offset, layout_.size(p), layout_.size(p)).trace().real();
  }
  rec.n_total = n;
  std::vector<double> values;
  for (std::size_t c = 0; c < rates_.size(); ++c) values.push_back(rates_[c] * lowering_expectation(x, jumps_[c]));
  assign_intensities(rec, mode_, channels_, values);
  for (const auto& down : momentum_) rec.momentum_occ.push_back(lowering_expectation(x, down));
  return rec;
}

std::vector<double> sample_times(double t0, double t_max, double interval) {
  std::vector<double> times{t0};
  if (t_max <= 0.0) return times;
  const auto count = static_cast<std::size_t>(std::floor(t_max / interval + 1e-9));
  for (std::size_t i = 1; i <= count; ++i) times.push_back(t0 + static_cast<double>(i) * interval);
  if (times.back() < t0 + t_max * (1.0 - 1e-12)) times.push_back(t0 + t_max);
  else times.back() = t0 + std::max(times.back() - t0, t_max);
  return times;
}

namespace {

bool steady_condition(const MasterSample& s, double steady_tol, double peak) {
  return s.obs.intensity_total <= steady_tol * peak && s.generator_norm < steady_tol;
}

}  // namespace

SteadyState detect_steady_state(const std::vector<MasterSample>& series, double steady_tol, int window) {
  SteadyState result;
  if (series.empty()) return result;
  double peak = 0.0;
  for (const auto& s : series) peak = std::max(peak, s.obs.intensity_total);
  const auto w = static_cast<std::size_t>(std::max(window, 1));
  std::size_t run = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    run = steady_condition(series[i], steady_tol, peak) ? run + 1 : 0;
    if (run >= w) {
      result.reached = true;
      result.index = i + 1 - w;
      result.time = series[result.index].obs.time;
      return result;
    }
  }
  return result;
}

MasterRun evolve_master(const DensityMatrix& rho0, const Model& model, const EvolutionConfig& config) {
  config.validate();
  const int n = model.params.n_sites;
  if (n > kMaxMasterSites) {
    throw ConfigError("master-equation mode supports N <= " + std::to_string(kMaxMasterSites));
  }
  if (rho0.dim() != model.dimension()) throw ConfigError("evolve_master: initial state dimension mismatch");

  const BlockedLiouvillian liouvillian(model, coherence_orders(rho0));
  ComplexVector x = liouvillian.pack(rho0);
  const bool check_positivity = config.monitor_positivity && n <= kPositivityMaxSites;

  AdaptiveOptions options;
  options.rel_tol = config.rel_tol;
  options.abs_tol = config.abs_tol;
  options.h_initial = config.dt_initial;
  options.h_min = std::max(1e-14, 1e-13 * config.t_max);
  auto rhs = [&liouvillian](double, const ComplexVector& y, ComplexVector& dy) { liouvillian.apply(y, dy); };
  DormandPrince45<decltype(rhs)> stepper(rhs, options);

  MasterRun run;
  ComplexVector dx;
  double t = rho0.time;
  double running_peak = 0.0;
  std::size_t steady_run = 0;
  for (double ts : sample_times(rho0.time, config.t_max, config.sample_interval)) {
    stepper.advance(t, x, ts);
    t = ts;
    MasterSample s;
    s.obs = liouvillian.measure(x, t);
    s.trace_error = std::abs(liouvillian.trace(x) - 1.0);
    s.hermiticity_error = liouvillian.hermiticity_error(x);
    liouvillian.apply(x, dx);
    s.generator_norm = dx.size() > 0 ? dx.cwiseAbs().maxCoeff() : 0.0;
    if (check_positivity) s.min_eigenvalue = liouvillian.min_eigenvalue(x);

    if (s.trace_error > kTraceTolerance) {
      throw InvariantError("trace drifted by " + std::to_string(s.trace_error) + at_time(t));
    }
    if (s.hermiticity_error > kHermiticityTolerance) {
      throw InvariantError("Hermiticity error " + std::to_string(s.hermiticity_error) + at_time(t));
    }
    if (check_positivity && s.min_eigenvalue < kPositivityAbort) {
      throw InvariantError("density matrix lost positivity (min eigenvalue " +
                           std::to_string(s.min_eigenvalue) + ")" + at_time(t));
    }
    if (config.keep_states) run.states.push_back(liouvillian.unpack(x, t));
    running_peak = std::max(running_peak, s.obs.intensity_total);
    steady_run = steady_condition(s, config.steady_tol, running_peak) ? steady_run + 1 : 0;
    run.samples.push_back(std::move(s));
    if (config.stop_at_steady && steady_run >= static_cast<std::size_t>(config.steady_window)) break;
  }
  run.final_state = liouvillian.unpack(x, t);
  run.steady = detect_steady_state(run.samples, config.steady_tol, config.steady_window);
  run.counters = stepper.counters();
  return run;
}

}  // namespace kcsr
