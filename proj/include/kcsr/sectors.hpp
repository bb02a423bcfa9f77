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

// Excitation-number sectors. The Hamiltonian conserves popcount and every
// jump operator lowers it by exactly one, so both engines work on
// popcount blocks instead of the full 2^N space.

#include <span>
#include <vector>

#include "kcsr/operators.hpp"

namespace kcsr {

class SectorLayout {
 public:
  explicit SectorLayout(int n_sites);

  int n_sites() const { return n_sites_; }
  Index dim() const { return static_cast<Index>(position_.size()); }
  int sector_count() const { return n_sites_ + 1; }

  Index offset(int p) const { return offset_[static_cast<std::size_t>(p)]; }
  Index size(int p) const {
    return offset_[static_cast<std::size_t>(p) + 1] - offset_[static_cast<std::size_t>(p)];
  }

  /// Configurations of sector p in ascending order.
  std::span<const BasisConfig> configs(int p) const;

  /// Position of a configuration in sector-major order.
  Index position(BasisConfig bits) const { return position_[static_cast<std::size_t>(bits)]; }
  Index local_index(BasisConfig bits) const { return position(bits) - offset(excitation_count(bits)); }

  ComplexVector to_sector_order(const ComplexVector& v) const;
  ComplexVector from_sector_order(const ComplexVector& v) const;

  /// Block of `op` mapping sector `from` into sector `to`, in local indices.
  SparseMatrix block(const SparseOperator& op, int to, int from) const;

 private:
  int n_sites_;
  std::vector<BasisConfig> ordered_;
  std::vector<Index> offset_;
  std::vector<Index> position_;
};

}  // namespace kcsr
