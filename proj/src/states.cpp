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

#include "kcsr/states.hpp"

#include <bit>

#include <Eigen/Eigenvalues>

namespace kcsr {

void PureState::normalize() {
  const double n = amplitudes.norm();
  if (n == 0.0) throw NumericalError("cannot normalize a zero state");
  amplitudes /= n;
}

PureState PureState::basis(int n_sites, BasisConfig bits) {
  if (n_sites < 1 || n_sites > kMaxSites) throw ConfigError("invalid site count");
  const Index dim = basis_dimension(n_sites);
  if (static_cast<Index>(bits) >= dim) throw ConfigError("configuration outside the basis");
  PureState psi;
  psi.amplitudes = ComplexVector::Zero(dim);
  psi.amplitudes(static_cast<Index>(bits)) = 1.0;
  return psi;
}

PureState PureState::fully_inverted(int n_sites) {
  return basis(n_sites, static_cast<BasisConfig>(basis_dimension(n_sites) - 1));
}

PureState PureState::vacuum(int n_sites) { return basis(n_sites, 0); }

double DensityMatrix::hermiticity_error() const {
  return (data - data.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  const ComplexMatrix herm = 0.5 * (data + data.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  DensityMatrix rho;
  rho.data = psi.amplitudes * psi.amplitudes.adjoint();
  rho.time = psi.time;
  return rho;
}

DensityMatrix DensityMatrix::basis(int n_sites, BasisConfig bits) {
  return from_pure(PureState::basis(n_sites, bits));
}

int sites_from_dimension(Index dim) {
  if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
    throw ConfigError("state dimension " + std::to_string(dim) + " is not a power of two");
  }
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

}  // namespace kcsr
