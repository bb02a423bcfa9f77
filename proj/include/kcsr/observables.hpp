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
#include <limits>
#include <vector>

#include "kcsr/operators.hpp"
#include "kcsr/states.hpp"

namespace kcsr {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of observable output.
///
/// `intensity` holds the three constrained channels; in the collective
/// reference mode those entries are NaN and only `intensity_total` is set.
struct ObservableRecord {
  double time = 0.0;
  double n_total = 0.0;
  std::array<double, 3> intensity{0.0, 0.0, 0.0};
  double intensity_total = 0.0;
  std::vector<double> momentum_occ;
  double entropy_halfchain = kNaN;
};

double excitation_number(const PureState& psi);
double excitation_number(const DensityMatrix& rho);

/// <A^dagger A> for any operator A.
double lowering_occupation(const PureState& psi, const SparseOperator& op);
double lowering_occupation(const DensityMatrix& rho, const SparseOperator& op);

/// rate * <S^+ S^->.
double channel_intensity(const PureState& psi, const ChannelSpec& channel);
double channel_intensity(const DensityMatrix& rho, const ChannelSpec& channel);

/// <S_k^+ S_k^-> for k on the momentum grid; builds the operator on each call.
double momentum_occupation(const PureState& psi, double k);
double momentum_occupation(const DensityMatrix& rho, double k);

/// Reduced density matrix on `keep_sites` (sorted, reduced bit i = keep_sites[i]).
/// Keeping every site returns the full density matrix.
ComplexMatrix partial_trace(const PureState& psi, const std::vector<int>& keep_sites);
ComplexMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep_sites);

/// -sum lambda ln lambda in nats. Eigenvalues in [-1e-10, 0) are clamped to 0.
double von_neumann_entropy(const ComplexMatrix& rho_reduced);

/// Contiguous block 0..floor(N/2)-1.
std::vector<int> halfchain_sites(int n_sites);

/// Entanglement entropy of `keep_sites` for a pure state.
double entanglement_entropy(const PureState& psi, const std::vector<int>& keep_sites);

/// Precomputed operators for measuring full observable records.
class ObservableSet {
 public:
  /// An empty `entropy_cut` disables the entropy column.
  explicit ObservableSet(const Model& model, std::vector<int> entropy_cut = {});

  ObservableRecord measure(const PureState& psi) const;
  ObservableRecord measure(const DensityMatrix& rho) const;

  const std::vector<ChannelSpec>& channels() const { return channels_; }
  const std::vector<SparseOperator>& momentum_ops() const { return momentum_; }
  const std::vector<int>& entropy_cut() const { return cut_; }
  EmissionMode mode() const { return mode_; }
  int n_sites() const { return n_sites_; }

 private:
  template <typename State>
  ObservableRecord measure_common(const State& state) const;

  int n_sites_;
  EmissionMode mode_;
  std::vector<ChannelSpec> channels_;
  std::vector<SparseOperator> momentum_;
  std::vector<int> cut_;
};

/// Fills the record's intensity fields from per-channel values.
void assign_intensities(ObservableRecord& record, EmissionMode mode,
                        const std::vector<ChannelSpec>& channels, const std::vector<double>& values);

}  // namespace kcsr
