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

// Quantum-jump unraveling of the master equation.
//
// States are propagated in sector-major order and only the popcount sectors
// that carry amplitude are touched. A trajectory that starts in a single
// sector stays in a single sector.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "kcsr/observables.hpp"
#include "kcsr/operators.hpp"
#include "kcsr/sectors.hpp"
#include "kcsr/states.hpp"

namespace kcsr {

/// Abort threshold for the summed jump probability of one step.
inline constexpr double kMaxJumpProbability = 0.1;

struct TrajectoryConfig {
  double t_max = 20.0;
  /// Substep of the no-jump evolution; 0 selects 1e-3 / max gamma.
  double dt = 0.0;
  std::uint64_t master_seed = 20260101;
  int n_traj = 100;
  /// Sites kept by the entropy cut; empty selects 0..N/2-1.
  std::vector<int> entropy_cut{};
  double record_cadence = 0.05;
  /// A state whose total jump rate drops below dark_rate_tol * min gamma is
  /// treated as dark and advanced with exact diagonal phases.
  double dark_rate_tol = 1e-12;
  int hist_bins = 40;
  /// Worker threads for ensembles; 0 uses the hardware concurrency.
  int threads = 0;
  bool keep_records = false;

  void validate() const;
  friend bool operator==(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

struct JumpEvent {
  double time = 0.0;
  int channel = 0;  ///< xi, or kCollectiveChannel in the Dicke mode
  /// Squared norm the no-jump branch keeps over the step, 1 - sum_xi p_xi.
  double pre_norm = 1.0;

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

struct TrajectoryRecord {
  std::uint64_t traj_index = 0;
  std::uint64_t seed = 0;
  std::vector<JumpEvent> events;
  std::vector<ObservableRecord> series;
  PureState final_state;
  /// Entropy at the time the trajectory went dark, or at t_max.
  double final_entropy = kNaN;
  /// Time the trajectory went dark; NaN if it never did.
  double dark_time = kNaN;
};

/// H - (i/2) sum_xi gamma_xi S_xi^+ S_xi^-.
SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian, const std::vector<ChannelSpec>& channels);

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of trajectory `traj_index`: splitmix64(master ^ splitmix64(index + golden)).
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t traj_index);

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
double uniform_draw(std::mt19937_64& rng);

class TrajectoryEngine {
 public:
  TrajectoryEngine(const Model& model, std::vector<int> entropy_cut = {});

  /// One first-order jump step driven by the uniform draw `u`. A jump occurs
  /// when u < sum_xi p_xi; the channel is the first whose cumulative
  /// probability exceeds u. The returned state is normalized and its time
  /// advanced by dt.
  std::optional<JumpEvent> step(PureState& psi, double dt, double u) const;

  /// Runs one trajectory to config.t_max; deterministic in (master_seed, traj_index).
  TrajectoryRecord run(const PureState& psi0, const TrajectoryConfig& config, std::uint64_t traj_index) const;

  /// Effective substep for a config (resolves dt = 0).
  double resolved_dt(const TrajectoryConfig& config) const;

  const Model& model() const { return model_; }
  const ObservableSet& observables() const { return observables_; }
  const SectorLayout& layout() const { return layout_; }

 private:
  struct SectorState {
    ComplexVector v;  ///< sector-major amplitudes
    int lo = 0;       ///< lowest populated sector
    int hi = -1;      ///< highest populated sector; empty when hi < lo
  };
  struct Workspace {
    ComplexVector k, acc, tmp, jumped;
  };

  SectorState to_sectors(const PureState& psi) const;
  PureState from_sectors(const SectorState& s, double time) const;
  void apply_generator(const SectorState& s, const ComplexVector& in, ComplexVector& out) const;
  double channel_weight(const SectorState& s, std::size_t channel) const;
  std::optional<JumpEvent> advance(SectorState& s, double t, double dt, double u, bool& dark, double dark_rate,
                                   Workspace& w) const;
  void apply_phases(SectorState& s, double dt) const;

  Model model_;
  SectorLayout layout_;
  ObservableSet observables_;
  std::vector<SparseMatrix> generator_;  ///< -i H_eff by sector
  std::vector<double> rates_;
  std::vector<std::vector<SparseMatrix>> jumps_;  ///< [channel][p]: sector p + 1 -> p
  RealVector energies_;                           ///< diagonal of H in sector order
  double min_rate_ = 0.0;
  double max_rate_ = 0.0;
};

/// Convenience wrapper that draws u from `rng`.
std::optional<JumpEvent> step_trajectory(const TrajectoryEngine& engine, PureState& psi, double dt,
                                         std::mt19937_64& rng);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 edges
  std::vector<std::uint64_t> counts;
};

/// Uniform bins over [lo, hi]; values outside the range are clamped into the end bins.
Histogram make_histogram(const std::vector<double>& values, int bins, double lo, double hi);

struct EnsembleResult {
  std::vector<ObservableRecord> mean;
  std::vector<ObservableRecord> std_error;
  /// emissions[i][c]: jumps of channel c inside record interval (t_{i-1}, t_i].
  std::vector<std::vector<std::uint64_t>> emissions;
  std::vector<double> final_n;
  std::vector<double> final_entropy;
  Histogram entropy_hist;
  double trivial_fraction = 0.0;
  double mean_final_entropy = 0.0;
  std::uint64_t total_jumps = 0;
  std::size_t dark_count = 0;  ///< trajectories that reached a dark state
  std::vector<TrajectoryRecord> records;  ///< only with keep_records
};

/// Runs config.n_traj trajectories on a thread pool. Results are reduced in
/// trajectory order, so the output does not depend on the thread count.
EnsembleResult run_ensemble(const TrajectoryEngine& engine, const PureState& psi0, const TrajectoryConfig& config);

/// Histogram range used by default: [0, floor(N/2) ln 2].
double entropy_upper_bound(int n_sites);

}  // namespace kcsr
