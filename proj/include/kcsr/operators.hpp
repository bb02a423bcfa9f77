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

#include <vector>

#include "kcsr/basis.hpp"
#include "kcsr/types.hpp"

namespace kcsr {

/// Lattice and coupling parameters of the periodic chain.
struct ChainParams {
  int n_sites = 6;
  double delta = 1.0;            ///< bare transition frequency
  double j_int = 0.2;            ///< nearest-neighbour interaction
  double gamma_prefactor = 1.0;  ///< rate prefactor, gamma_xi = prefactor * omega_xi^3

  /// Throws ConfigError when a field is out of range. The constrained model
  /// needs three sites; collective-only constructions accept fewer.
  void validate(int min_sites = 3) const;

  Index dimension() const { return basis_dimension(n_sites); }
  double channel_frequency(int xi) const { return delta + xi * j_int; }
  double channel_rate(int xi) const;

  friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

/// Immutable sparse operator on the 2^N configuration basis.
///
/// Assembly sums duplicate (row, col) entries and drops exact zeros, so the
/// stored pattern is canonical. Operators are shared read-only between
/// threads once built.
class SparseOperator {
 public:
  SparseOperator() = default;

  static SparseOperator from_triplets(Index dim, const std::vector<Triplet>& entries,
                                      bool diagonal = false);
  static SparseOperator from_matrix(SparseMatrix matrix, bool diagonal = false);

  Index dim() const { return matrix_.rows(); }
  Index nonzeros() const { return matrix_.nonZeros(); }
  bool is_diagonal() const { return diagonal_; }
  const SparseMatrix& matrix() const { return matrix_; }

  /// Diagonal entries as a dense vector (valid for any operator).
  ComplexVector diagonal() const;

  ComplexVector apply(const ComplexVector& v) const { return matrix_ * v; }
  ComplexMatrix to_dense() const { return ComplexMatrix(matrix_); }
  SparseOperator adjoint() const;

  /// Largest entry magnitude.
  double max_abs() const;

 private:
  SparseMatrix matrix_;
  bool diagonal_ = false;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(Complex scale, const SparseOperator& a);

/// Channel index used for the unconstrained collective (Dicke) channel.
inline constexpr int kCollectiveChannel = -1;

/// One emission channel: frequency, rate and jump operator.
struct ChannelSpec {
  int xi = 0;
  double omega = 0.0;
  double rate = 0.0;
  SparseOperator op;
};

SparseOperator build_hamiltonian(const ChainParams& params);

/// Constrained collective lowering operator for emission with `xi` excited
/// neighbours. Every entry is exactly +1.
ChannelSpec build_constrained_jump(const ChainParams& params, int xi);

/// Unconstrained sum of single-site lowering operators. Accepts N >= 1.
SparseOperator build_collective_lowering(const ChainParams& params);

/// Fourier lowering operator (1/sqrt N) sum_j exp(-i k j) sigma_j^-.
/// `k` must lie on the grid 2 pi m / N. Accepts N >= 1.
SparseOperator build_momentum_lowering(const ChainParams& params, double k);

/// Same as above, addressed by the grid index m in [0, N).
SparseOperator build_momentum_lowering_mode(const ChainParams& params, int mode);

/// Momentum grid 2 pi m / N, m = 0..N-1.
std::vector<double> momentum_grid(int n_sites);

/// max |[H, S] + omega S| over all entries.
double verify_eigenoperator(const SparseOperator& hamiltonian, const ChannelSpec& channel);

/// Same identity for an arbitrary frequency, used to probe mismatched values.
double eigenoperator_residual(const SparseOperator& hamiltonian, const SparseOperator& op,
                              double omega);

enum class EmissionMode { kc, dicke };

/// Hamiltonian plus the set of dissipative channels that drive it.
struct Model {
  ChainParams params;
  EmissionMode mode = EmissionMode::kc;
  SparseOperator hamiltonian;
  std::vector<ChannelSpec> channels;

  Index dimension() const { return params.dimension(); }
};

/// Three constrained channels with gamma_xi = prefactor * (delta + xi J)^3.
Model make_kc_model(const ChainParams& params);

/// Single collective channel with the given rate (N >= 1). The Hamiltonian keeps only
/// the on-site term delta * n; the interaction would otherwise leak population
/// out of the symmetric manifold.
Model make_dicke_model(const ChainParams& params, double dicke_rate);

/// Default Dicke rate prefactor * delta^3.
double default_dicke_rate(const ChainParams& params);

}  // namespace kcsr
