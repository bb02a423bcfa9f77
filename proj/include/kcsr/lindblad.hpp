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

#include <cstddef>
#include <vector>

#include "kcsr/observables.hpp"
#include "kcsr/ode.hpp"
#include "kcsr/operators.hpp"
#include "kcsr/sectors.hpp"
#include "kcsr/states.hpp"

namespace kcsr {

/// Largest chain evolved with a dense density matrix.
inline constexpr int kMaxMasterSites = 12;

struct EvolutionConfig {
  double t_max = 10.0;
  double dt_initial = 1e-3;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double sample_interval = 0.05;
  double steady_tol = 1e-6;
  /// Consecutive samples that must satisfy the steady criterion.
  int steady_window = 2;
  bool stop_at_steady = false;
  bool keep_states = false;
  /// Eigenvalue check at every sample (only for N <= 8).
  bool monitor_positivity = true;

  void validate() const;
  friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

/// Master-equation right-hand side on the full dense matrix:
/// -i[H, rho] + sum_xi gamma_xi (S rho S^+ - {S^+ S, rho} / 2).
ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const SparseOperator& hamiltonian,
                           const std::vector<ChannelSpec>& channels);

/// Dense superoperator on column-stacked vec(rho), dimension 4^N. Reference
/// path for small N only.
ComplexMatrix dense_liouvillian(const Model& model);

/// Liouvillian restricted to the popcount blocks (p, q) whose coherence
/// order p - q belongs to a fixed set. The set is invariant under the
/// dynamics, so a fully inverted start only ever touches the p == q blocks.
///
/// Packed states are the concatenation of column-major blocks.
class BlockedLiouvillian {
 public:
  BlockedLiouvillian(const Model& model, std::vector<int> coherence_orders);

  Index packed_size() const { return packed_size_; }
  const std::vector<int>& coherence_orders() const { return orders_; }

  ComplexVector pack(const DensityMatrix& rho) const;
  DensityMatrix unpack(const ComplexVector& x, double time) const;

  void apply(const ComplexVector& x, ComplexVector& dx) const;

  /// Observable record (no entropy) evaluated directly on the packed state.
  ObservableRecord measure(const ComplexVector& x, double time) const;

  Complex trace(const ComplexVector& x) const;
  double hermiticity_error(const ComplexVector& x) const;
  double min_eigenvalue(const ComplexVector& x) const;

 private:
  struct Block {
    int p;
    int q;
    Index offset;
    int lower;  ///< index of block (p + 1, q + 1), or -1
    int mirror; ///< index of block (q, p), or -1
  };

  double lowering_expectation(const ComplexVector& x, const std::vector<SparseMatrix>& blocks) const;

  EmissionMode mode_;
  std::vector<ChannelSpec> channels_;
  SectorLayout layout_;
  std::vector<int> orders_;
  std::vector<Block> blocks_;
  std::vector<int> diagonal_block_;  ///< block index of (p, p) by sector, -1 if absent
  Index packed_size_ = 0;
  std::vector<SparseMatrix> heff_;      ///< by sector
  std::vector<SparseMatrix> heff_adj_;  ///< by sector
  std::vector<double> rates_;
  /// jumps_[c][p] maps sector p + 1 into p; jumps_adj_ holds the adjoints.
  std::vector<std::vector<SparseMatrix>> jumps_;
  std::vector<std::vector<SparseMatrix>> jumps_adj_;
  std::vector<std::vector<SparseMatrix>> momentum_;
};

/// Coherence orders p - q carried by a density matrix (exact nonzeros).
std::vector<int> coherence_orders(const DensityMatrix& rho);

struct MasterSample {
  ObservableRecord obs;
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double generator_norm = 0.0;  ///< max |d rho / dt|
  double min_eigenvalue = kNaN; ///< NaN when not monitored
};

struct SteadyState {
  bool reached = false;
  double time = kNaN;
  std::size_t index = 0;
};

struct MasterRun {
  std::vector<MasterSample> samples;
  std::vector<DensityMatrix> states;  ///< filled when keep_states is set
  DensityMatrix final_state;
  SteadyState steady;
  StepCounters counters;
};

/// Sample times t0 + i * interval up to t0 + t_max (t_max is always the last one).
std::vector<double> sample_times(double t0, double t_max, double interval);

/// Adaptive evolution of rho0 under the model, sampled every
/// config.sample_interval. Throws InvariantError when trace, Hermiticity or
/// positivity drift beyond tolerance and NumericalError on step underflow.
MasterRun evolve_master(const DensityMatrix& rho0, const Model& model, const EvolutionConfig& config);

/// First sample from which I_total <= steady_tol * I_peak and
/// max |d rho / dt| < steady_tol hold for `window` consecutive samples.
SteadyState detect_steady_state(const std::vector<MasterSample>& series, double steady_tol, int window = 2);

}  // namespace kcsr
