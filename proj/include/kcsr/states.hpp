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

#include "kcsr/basis.hpp"
#include "kcsr/types.hpp"

namespace kcsr {

/// Normalized amplitude vector over the configuration basis.
struct PureState {
  ComplexVector amplitudes;
  double time = 0.0;

  Index dim() const { return amplitudes.size(); }
  double norm() const { return amplitudes.norm(); }
  void normalize();

  static PureState basis(int n_sites, BasisConfig bits);
  static PureState fully_inverted(int n_sites);
  static PureState vacuum(int n_sites);
};

/// Dense Hermitian unit-trace matrix over the configuration basis.
struct DensityMatrix {
  ComplexMatrix data;
  double time = 0.0;

  Index dim() const { return data.rows(); }
  Complex trace() const { return data.trace(); }
  /// max |rho - rho^dagger| entrywise.
  double hermiticity_error() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix basis(int n_sites, BasisConfig bits);
};

/// Site count implied by a 2^N dimension; throws when `dim` is not a power of two.
int sites_from_dimension(Index dim);

}  // namespace kcsr
