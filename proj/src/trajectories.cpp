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

#include "kcsr/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "kcsr/lindblad.hpp"

namespace kcsr {

namespace {

// Flattened view of an ObservableRecord used by the ensemble reduction.
std::vector<double> flatten(const ObservableRecord& r) {
  std::vector<double> out{r.n_total, r.intensity[0], r.intensity[1], r.intensity[2], r.intensity_total,
                          r.entropy_halfchain};
  out.insert(out.end(), r.momentum_occ.begin(), r.momentum_occ.end());
  return out;
}

ObservableRecord unflatten(const std::vector<double>& v, double time) {
  ObservableRecord r;
  r.time = time;
  r.n_total = v[0];
  r.intensity = {v[1], v[2], v[3]};
  r.intensity_total = v[4];
  r.entropy_halfchain = v[5];
  r.momentum_occ.assign(v.begin() + 6, v.end());
  return r;
}

// Running mean and sum of squared deviations per field and sample time.
struct Welford {
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> m2;
  std::size_t count = 0;

  void add(const std::vector<ObservableRecord>& series) {
    if (mean.empty()) {
      for (const auto& r : series) {
        mean.push_back(std::vector<double>(flatten(r).size(), 0.0));
        m2.push_back(mean.back());
      }
    }
    if (series.size() != mean.size()) throw InvariantError("ensemble: inconsistent sampling grid");
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < series.size(); ++i) {
      const std::vector<double> x = flatten(series[i]);
      for (std::size_t f = 0; f < x.size(); ++f) {
        const double d = x[f] - mean[i][f];
        mean[i][f] += d * inv;
        m2[i][f] += d * (x[f] - mean[i][f]);
      }
    }
  }
};

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max >= 0 required");
  if (!(dt >= 0.0)) throw ConfigError("dt >= 0 required (0 selects the default)");
  if (n_traj < 1) throw ConfigError("n_traj >= 1 required");
  if (!(record_cadence > 0.0)) throw ConfigError("record_cadence > 0 required");
  if (t_max > 0.0 && record_cadence > t_max) throw ConfigError("record_cadence <= t_max required");
  if (!(dark_rate_tol >= 0.0)) throw ConfigError("dark_rate_tol >= 0 required");
  if (hist_bins < 1) throw ConfigError("hist_bins >= 1 required");
  if (threads < 0) throw ConfigError("threads >= 0 required");
}

SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian, const std::vector<ChannelSpec>& channels) {
  const Index dim = hamiltonian.dim();
  SparseOperator decay = SparseOperator::from_matrix(SparseMatrix(dim, dim));
  for (const auto& ch : channels) {
    if (ch.op.dim() != dim) throw ConfigError("effective_hamiltonian: channel dimension mismatch");
    decay = decay + Complex(ch.rate) * (ch.op.adjoint() * ch.op);
  }
  return hamiltonian - Complex(0.0, 0.5) * decay;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t traj_index) {
  return splitmix64(master_seed ^ splitmix64(traj_index + 0x9E3779B97F4A7C15ULL));
}

double uniform_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TrajectoryEngine::TrajectoryEngine(const Model& model, std::vector<int> entropy_cut)
    : model_(model),
      layout_(model.params.n_sites),
      observables_(model, entropy_cut.empty() ? halfchain_sites(model.params.n_sites) : std::move(entropy_cut)) {
  const int n = model.params.n_sites;
  const SparseOperator heff = effective_hamiltonian(model.hamiltonian, model.channels);
  for (int p = 0; p <= n; ++p) generator_.push_back(SparseMatrix(-kI * layout_.block(heff, p, p)));
  for (const auto& ch : model.channels) {
    rates_.push_back(ch.rate);
    std::vector<SparseMatrix> down;
    for (int p = 0; p < n; ++p) down.push_back(layout_.block(ch.op, p, p + 1));
    jumps_.push_back(std::move(down));
  }
  if (rates_.empty()) throw ConfigError("trajectory engine: model has no channels");
  min_rate_ = *std::min_element(rates_.begin(), rates_.end());
  max_rate_ = *std::max_element(rates_.begin(), rates_.end());
  energies_ = layout_.to_sector_order(model.hamiltonian.diagonal()).real();
}

double TrajectoryEngine::resolved_dt(const TrajectoryConfig& config) const {
  return config.dt > 0.0 ? config.dt : 1e-3 / max_rate_;
}

TrajectoryEngine::SectorState TrajectoryEngine::to_sectors(const PureState& psi) const {
  if (psi.dim() != layout_.dim()) throw ConfigError("trajectory: state dimension mismatch");
  SectorState s;
  s.v = layout_.to_sector_order(psi.amplitudes);
  s.lo = layout_.sector_count();
  s.hi = -1;
  for (int p = 0; p < layout_.sector_count(); ++p) {
    if (s.v.segment(layout_.offset(p), layout_.size(p)).squaredNorm() > 0.0) {
      s.lo = std::min(s.lo, p);
      s.hi = p;
    }
  }
  if (s.hi < s.lo) throw ConfigError("trajectory: zero initial state");
  return s;
}

PureState TrajectoryEngine::from_sectors(const SectorState& s, double time) const {
  ComplexVector v = ComplexVector::Zero(layout_.dim());
  const Index begin = layout_.offset(s.lo);
  const Index len = layout_.offset(s.hi + 1) - begin;
  v.segment(begin, len) = s.v.segment(begin, len);
  PureState psi;
  psi.amplitudes = layout_.from_sector_order(v);
  psi.time = time;
  return psi;
}

void TrajectoryEngine::apply_generator(const SectorState& s, const ComplexVector& in, ComplexVector& out) const {
  for (int p = s.lo; p <= s.hi; ++p) {
    out.segment(layout_.offset(p), layout_.size(p)).noalias() =
        generator_[static_cast<std::size_t>(p)] * in.segment(layout_.offset(p), layout_.size(p));
  }
}

double TrajectoryEngine::channel_weight(const SectorState& s, std::size_t channel) const {
  double w = 0.0;
  for (int p = std::max(s.lo, 1); p <= s.hi; ++p) {
    w += (jumps_[channel][static_cast<std::size_t>(p - 1)] * s.v.segment(layout_.offset(p), layout_.size(p)))
             .squaredNorm();
  }
  return w;
}

void TrajectoryEngine::apply_phases(SectorState& s, double dt) const {
  const Index begin = layout_.offset(s.lo);
  const Index end = layout_.offset(s.hi + 1);
  for (Index i = begin; i < end; ++i) s.v(i) *= std::polar(1.0, -energies_(i) * dt);
}

std::optional<JumpEvent> TrajectoryEngine::advance(SectorState& s, double t, double dt, double u, bool& dark,
                                                   double dark_rate, Workspace& w) const {
  const Index begin = layout_.offset(s.lo);
  const Index len = layout_.offset(s.hi + 1) - begin;
  auto seg = [&](ComplexVector& x) { return x.segment(begin, len); };
  w.k.resize(s.v.size());
  w.acc.resize(s.v.size());
  w.tmp.resize(s.v.size());

  apply_generator(s, s.v, w.k);
  // Total jump rate from the anti-Hermitian part: -2 Im <psi|H_eff|psi>.
  const double rate = -2.0 * s.v.segment(begin, len).dot(w.k.segment(begin, len)).real();
  if (rate < dark_rate) {
    // The caller switches to exact phase evolution from t on.
    dark = true;
    return std::nullopt;
  }
  const double p_total = dt * rate;
  if (p_total > kMaxJumpProbability) {
    throw NumericalError("dt too large: jump probability " + std::to_string(p_total) + " per step at t = " +
                         std::to_string(t));
  }

  if (u < p_total * (1.0 + 1e-9)) {
    std::vector<double> p(rates_.size());
    double cumulative = 0.0;
    for (std::size_t c = 0; c < rates_.size(); ++c) {
      p[c] = dt * rates_[c] * channel_weight(s, c);
      cumulative += p[c];
    }
    const double p_exact = cumulative;
    cumulative = 0.0;
    for (std::size_t c = 0; c < rates_.size(); ++c) {
      cumulative += p[c];
      if (u >= cumulative) continue;
      const int new_lo = std::max(s.lo, 1) - 1;
      const int new_hi = s.hi - 1;
      w.jumped.resize(s.v.size());
      for (int q = std::max(s.lo, 1); q <= s.hi; ++q) {
        w.jumped.segment(layout_.offset(q - 1), layout_.size(q - 1)).noalias() =
            jumps_[c][static_cast<std::size_t>(q - 1)] * s.v.segment(layout_.offset(q), layout_.size(q));
      }
      const Index nb = layout_.offset(new_lo);
      const Index nl = layout_.offset(new_hi + 1) - nb;
      const double norm = w.jumped.segment(nb, nl).norm();
      if (!(norm > 0.0)) throw InvariantError("jump produced a zero state at t = " + std::to_string(t));
      s.v.segment(nb, nl) = w.jumped.segment(nb, nl) / norm;
      s.lo = new_lo;
      s.hi = new_hi;
      return JumpEvent{t + dt, model_.channels[c].xi, 1.0 - p_exact};
    }
  }

  // No jump: classical RK4 on psi' = -i H_eff psi, then renormalize.
  seg(w.acc) = seg(s.v) + (dt / 6.0) * seg(w.k);
  seg(w.tmp) = seg(s.v) + (dt / 2.0) * seg(w.k);
  apply_generator(s, w.tmp, w.k);
  seg(w.acc) += (dt / 3.0) * seg(w.k);
  seg(w.tmp) = seg(s.v) + (dt / 2.0) * seg(w.k);
  apply_generator(s, w.tmp, w.k);
  seg(w.acc) += (dt / 3.0) * seg(w.k);
  seg(w.tmp) = seg(s.v) + dt * seg(w.k);
  apply_generator(s, w.tmp, w.k);
  seg(w.acc) += (dt / 6.0) * seg(w.k);
  const double norm = seg(w.acc).norm();
  if (!(norm > 0.0)) throw NumericalError("no-jump evolution lost the state at t = " + std::to_string(t));
  seg(s.v) = seg(w.acc) / norm;
  return std::nullopt;
}

std::optional<JumpEvent> TrajectoryEngine::step(PureState& psi, double dt, double u) const {
  if (!(dt > 0.0)) throw ConfigError("step: dt > 0 required");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ConfigError("step: state is not normalized");
  SectorState s = to_sectors(psi);
  Workspace w;
  bool dark = false;
  const auto event = advance(s, psi.time, dt, u, dark, 0.0, w);
  if (dark) apply_phases(s, dt);
  psi = from_sectors(s, psi.time + dt);
  return event;
}

TrajectoryRecord TrajectoryEngine::run(const PureState& psi0, const TrajectoryConfig& config,
                                       std::uint64_t traj_index) const {
  config.validate();
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ConfigError("trajectory: initial state is not normalized");
  const double dt = resolved_dt(config);
  const double dark_rate = config.dark_rate_tol * min_rate_;

  TrajectoryRecord rec;
  rec.traj_index = traj_index;
  rec.seed = trajectory_seed(config.master_seed, traj_index);
  std::mt19937_64 rng(rec.seed);

  SectorState s = to_sectors(psi0);
  Workspace w;
  bool dark = false;
  const std::vector<double> times = sample_times(psi0.time, config.t_max, config.record_cadence);
  rec.series.reserve(times.size());
  rec.series.push_back(observables_.measure(from_sectors(s, times.front())));

  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t0 = times[i - 1];
    const double span = times[i] - t0;
    const auto steps = std::max<long long>(1, static_cast<long long>(std::ceil(span / dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (long long k = 0; k < steps; ++k) {
      const double t = t0 + static_cast<double>(k) * h;
      if (dark) {
        apply_phases(s, h);
        continue;
      }
      auto event = advance(s, t, h, uniform_draw(rng), dark, dark_rate, w);
      if (event) {
        if (k + 1 == steps) event->time = times[i];
        rec.events.push_back(*event);
      } else if (dark) {
        rec.dark_time = t;
        rec.final_entropy = observables_.measure(from_sectors(s, t)).entropy_halfchain;
        apply_phases(s, h);
      }
    }
    rec.series.push_back(observables_.measure(from_sectors(s, times[i])));
  }
  rec.final_state = from_sectors(s, times.back());
  if (std::isnan(rec.dark_time)) rec.final_entropy = rec.series.back().entropy_halfchain;
  return rec;
}

std::optional<JumpEvent> step_trajectory(const TrajectoryEngine& engine, PureState& psi, double dt,
                                         std::mt19937_64& rng) {
  return engine.step(psi, dt, uniform_draw(rng));
}

Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw ConfigError("histogram: need bins >= 1 and hi > lo");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * width);
  for (double v : values) {
    if (std::isnan(v)) continue;
    const double pos = std::floor((v - lo) / width);
    const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
    ++h.counts[bin];
  }
  return h;
}

double entropy_upper_bound(int n_sites) { return (n_sites / 2) * std::log(2.0); }

EnsembleResult run_ensemble(const TrajectoryEngine& engine, const PureState& psi0, const TrajectoryConfig& config) {
  config.validate();
  const int n = engine.model().params.n_sites;
  const auto total = static_cast<std::size_t>(config.n_traj);
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
  const std::vector<double> times = sample_times(psi0.time, config.t_max, config.record_cadence);

  std::vector<int> channel_xi;
  for (const auto& ch : engine.model().channels) channel_xi.push_back(ch.xi);

  EnsembleResult result;
  result.emissions.assign(times.size(), std::vector<std::uint64_t>(channel_xi.size(), 0));
  Welford acc;

  // Fixed-size blocks bound memory; each block is reduced in index order.
  const std::size_t block = std::max<std::size_t>(64, 4 * workers);
  std::vector<TrajectoryRecord> slots;
  std::vector<std::exception_ptr> errors;
  for (std::size_t first = 0; first < total; first += block) {
    const std::size_t count = std::min(block, total - first);
    slots.assign(count, TrajectoryRecord{});
    errors.assign(count, nullptr);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          slots[i] = engine.run(psi0, config, first + i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    for (auto& rec : slots) {
      acc.add(rec.series);
      for (const auto& ev : rec.events) {
        const auto bin = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), ev.time) - times.begin());
        const auto c = static_cast<std::size_t>(std::find(channel_xi.begin(), channel_xi.end(), ev.channel) -
                                                channel_xi.begin());
        if (bin < times.size() && c < channel_xi.size()) ++result.emissions[bin][c];
      }
      result.total_jumps += rec.events.size();
      if (!std::isnan(rec.dark_time)) ++result.dark_count;
      result.final_n.push_back(rec.series.back().n_total);
      result.final_entropy.push_back(rec.final_entropy);
      if (config.keep_records) result.records.push_back(std::move(rec));
    }
  }

  const double m = static_cast<double>(acc.count);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> se(acc.m2[i].size(), 0.0);
    if (acc.count > 1) {
      for (std::size_t f = 0; f < se.size(); ++f) se[f] = std::sqrt(acc.m2[i][f] / (m - 1.0) / m);
    }
    result.mean.push_back(unflatten(acc.mean[i], times[i]));
    result.std_error.push_back(unflatten(se, times[i]));
  }

  std::size_t trivial = 0;
  double entropy_sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    if (result.final_n[i] < 0.5 / n) ++trivial;
    entropy_sum += result.final_entropy[i];
  }
  result.trivial_fraction = static_cast<double>(trivial) / m;
  result.mean_final_entropy = entropy_sum / m;
  const auto& cut = engine.observables().entropy_cut();
  const int kept = static_cast<int>(cut.size());
  double upper = std::min(kept, n - kept) * std::log(2.0);
  if (!(upper > 0.0)) upper = 1.0;
  result.entropy_hist = make_histogram(result.final_entropy, config.hist_bins, 0.0, upper);
  return result;
}

}  // namespace kcsr
