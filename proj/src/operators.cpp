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

#include "kcsr/operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace kcsr {

namespace {

constexpr int kMaxOperatorSites = 20;

void require_same_dim(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()) + ")");
  }
}

// exp(-2 pi i r / n) with exact values on quarter turns.
Complex unit_phase(int r, int n) {
  r %= n;
  if ((4 * r) % n == 0) {
    switch ((4 * r) / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  return std::polar(1.0, -2.0 * std::numbers::pi * r / n);
}

}  // namespace

void ChainParams::validate(int min_sites) const {
  if (n_sites < min_sites) {
    throw ConfigError("N >= " + std::to_string(min_sites) + " required (got " +
                      std::to_string(n_sites) + ")");
  }
  if (n_sites > kMaxOperatorSites) {
    throw ConfigError("N <= " + std::to_string(kMaxOperatorSites) + " required (got " +
                      std::to_string(n_sites) + ")");
  }
  if (!std::isfinite(delta) || delta <= 0.0) throw ConfigError("delta > 0 required");
  if (!std::isfinite(j_int) || j_int < 0.0) throw ConfigError("j_int >= 0 required");
  if (!std::isfinite(gamma_prefactor) || gamma_prefactor <= 0.0) {
    throw ConfigError("gamma > 0 required");
  }
}

double ChainParams::channel_rate(int xi) const {
  const double omega = channel_frequency(xi);
  return gamma_prefactor * omega * omega * omega;
}

SparseOperator SparseOperator::from_triplets(Index dim, const std::vector<Triplet>& entries,
                                             bool diagonal) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return from_matrix(std::move(m), diagonal);
}

SparseOperator SparseOperator::from_matrix(SparseMatrix matrix, bool diagonal) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("operator must be square");
  matrix.prune(Complex{0.0, 0.0}, 0.0);
  matrix.makeCompressed();
  SparseOperator op;
  op.matrix_ = std::move(matrix);
  op.diagonal_ = diagonal;
  return op;
}

ComplexVector SparseOperator::diagonal() const { return matrix_.diagonal(); }

SparseOperator SparseOperator::adjoint() const {
  return from_matrix(SparseMatrix(matrix_.adjoint()), diagonal_);
}

double SparseOperator::max_abs() const {
  double best = 0.0;
  for (Index k = 0; k < matrix_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) best = std::max(best, std::abs(it.value()));
  }
  return best;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "operator+");
  return SparseOperator::from_matrix(a.matrix() + b.matrix(), a.is_diagonal() && b.is_diagonal());
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "operator-");
  return SparseOperator::from_matrix(a.matrix() - b.matrix(), a.is_diagonal() && b.is_diagonal());
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same_dim(a, b, "operator*");
  return SparseOperator::from_matrix(SparseMatrix(a.matrix() * b.matrix()),
                                     a.is_diagonal() && b.is_diagonal());
}

SparseOperator operator*(Complex scale, const SparseOperator& a) {
  return SparseOperator::from_matrix(SparseMatrix(scale * a.matrix()), a.is_diagonal());
}

namespace {

SparseOperator assemble_hamiltonian(const ChainParams& params) {
  const Index dim = params.dimension();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(dim));
  for (Index b = 0; b < dim; ++b) {
    const auto bits = static_cast<BasisConfig>(b);
    const double energy = params.delta * excitation_count(bits) +
                          params.j_int * excited_bond_count(bits, params.n_sites);
    entries.emplace_back(b, b, energy);
  }
  return SparseOperator::from_triplets(dim, entries, /*diagonal=*/true);
}

}  // namespace

SparseOperator build_hamiltonian(const ChainParams& params) {
  params.validate();
  return assemble_hamiltonian(params);
}

ChannelSpec build_constrained_jump(const ChainParams& params, int xi) {
  params.validate();
  if (xi < 0 || xi > 2) throw ConfigError("channel index must be 0, 1 or 2 (got " + std::to_string(xi) + ")");
  const int n = params.n_sites;
  const Index dim = params.dimension();
  std::vector<Triplet> entries;
  for (Index b = 0; b < dim; ++b) {
    const auto bits = static_cast<BasisConfig>(b);
    for (int j = 0; j < n; ++j) {
      if (site_excited(bits, j) && neighbor_count(bits, j, n) == xi) {
        entries.emplace_back(static_cast<Index>(flip_site(bits, j)), b, 1.0);
      }
    }
  }
  ChannelSpec spec;
  spec.xi = xi;
  spec.omega = params.channel_frequency(xi);
  spec.rate = params.channel_rate(xi);
  spec.op = SparseOperator::from_triplets(dim, entries);
  return spec;
}

SparseOperator build_collective_lowering(const ChainParams& params) {
  params.validate(1);
  const Index dim = params.dimension();
  std::vector<Triplet> entries;
  for (Index b = 0; b < dim; ++b) {
    const auto bits = static_cast<BasisConfig>(b);
    for (int j = 0; j < params.n_sites; ++j) {
      if (site_excited(bits, j)) entries.emplace_back(static_cast<Index>(flip_site(bits, j)), b, 1.0);
    }
  }
  return SparseOperator::from_triplets(dim, entries);
}

std::vector<double> momentum_grid(int n_sites) {
  std::vector<double> ks(static_cast<std::size_t>(n_sites));
  for (int m = 0; m < n_sites; ++m) ks[static_cast<std::size_t>(m)] = 2.0 * std::numbers::pi * m / n_sites;
  return ks;
}

SparseOperator build_momentum_lowering_mode(const ChainParams& params, int mode) {
  params.validate(1);
  const int n = params.n_sites;
  if (mode < 0 || mode >= n) {
    throw ConfigError("momentum index must lie in [0, N) (got " + std::to_string(mode) + ")");
  }
  const Index dim = params.dimension();
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<Complex> phase(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) phase[static_cast<std::size_t>(j)] = norm * unit_phase(mode * j, n);

  std::vector<Triplet> entries;
  for (Index b = 0; b < dim; ++b) {
    const auto bits = static_cast<BasisConfig>(b);
    for (int j = 0; j < n; ++j) {
      if (site_excited(bits, j)) {
        entries.emplace_back(static_cast<Index>(flip_site(bits, j)), b, phase[static_cast<std::size_t>(j)]);
      }
    }
  }
  return SparseOperator::from_triplets(dim, entries);
}

SparseOperator build_momentum_lowering(const ChainParams& params, double k) {
  params.validate(1);
  const int n = params.n_sites;
  const double step = 2.0 * std::numbers::pi / n;
  const double m = std::round(k / step);
  if (!std::isfinite(k) || std::abs(k - m * step) > 1e-9 || m < 0 || m >= n) {
    throw ConfigError("momentum " + std::to_string(k) + " is not on the grid 2*pi*m/N, m in [0, N)");
  }
  return build_momentum_lowering_mode(params, static_cast<int>(m));
}

double eigenoperator_residual(const SparseOperator& hamiltonian, const SparseOperator& op,
                              double omega) {
  require_same_dim(hamiltonian, op, "eigenoperator check");
  const SparseMatrix& h = hamiltonian.matrix();
  const SparseMatrix& s = op.matrix();
  SparseMatrix residual = SparseMatrix(h * s) - SparseMatrix(s * h) + Complex(omega) * s;
  double worst = 0.0;
  for (Index k = 0; k < residual.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(residual, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double verify_eigenoperator(const SparseOperator& hamiltonian, const ChannelSpec& channel) {
  if (!hamiltonian.is_diagonal()) throw ConfigError("eigenoperator check expects a diagonal Hamiltonian");
  return eigenoperator_residual(hamiltonian, channel.op, channel.omega);
}

Model make_kc_model(const ChainParams& params) {
  Model model;
  model.params = params;
  model.mode = EmissionMode::kc;
  model.hamiltonian = build_hamiltonian(params);
  for (int xi = 0; xi < 3; ++xi) model.channels.push_back(build_constrained_jump(params, xi));
  return model;
}

double default_dicke_rate(const ChainParams& params) {
  return params.gamma_prefactor * params.delta * params.delta * params.delta;
}

Model make_dicke_model(const ChainParams& params, double dicke_rate) {
  params.validate(1);
  if (!std::isfinite(dicke_rate) || dicke_rate <= 0.0) throw ConfigError("dicke_rate > 0 required");
  ChainParams on_site = params;
  on_site.j_int = 0.0;
  Model model;
  model.params = params;
  model.mode = EmissionMode::dicke;
  model.hamiltonian = assemble_hamiltonian(on_site);
  ChannelSpec collective;
  collective.xi = kCollectiveChannel;
  collective.omega = params.delta;
  collective.rate = dicke_rate;
  collective.op = build_collective_lowering(params);
  model.channels.push_back(std::move(collective));
  return model;
}

}  // namespace kcsr
