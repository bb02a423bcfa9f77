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

#include "kcsr/sectors.hpp"

#include <algorithm>

namespace kcsr {

SectorLayout::SectorLayout(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1 || n_sites > kMaxSites) throw ConfigError("sector layout: invalid site count");
  const Index dim = basis_dimension(n_sites);
  ordered_.resize(static_cast<std::size_t>(dim));
  for (Index b = 0; b < dim; ++b) ordered_[static_cast<std::size_t>(b)] = static_cast<BasisConfig>(b);
  std::stable_sort(ordered_.begin(), ordered_.end(), [](BasisConfig a, BasisConfig b) {
    return excitation_count(a) < excitation_count(b);
  });
  offset_.assign(static_cast<std::size_t>(n_sites) + 2, 0);
  for (BasisConfig b : ordered_) ++offset_[static_cast<std::size_t>(excitation_count(b)) + 1];
  for (std::size_t p = 1; p < offset_.size(); ++p) offset_[p] += offset_[p - 1];
  position_.resize(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < ordered_.size(); ++i) position_[static_cast<std::size_t>(ordered_[i])] = static_cast<Index>(i);
}

std::span<const BasisConfig> SectorLayout::configs(int p) const {
  return {ordered_.data() + offset(p), static_cast<std::size_t>(size(p))};
}

ComplexVector SectorLayout::to_sector_order(const ComplexVector& v) const {
  if (v.size() != dim()) throw ConfigError("sector layout: vector dimension mismatch");
  ComplexVector out(dim());
  for (Index i = 0; i < dim(); ++i) out(i) = v(static_cast<Index>(ordered_[static_cast<std::size_t>(i)]));
  return out;
}

ComplexVector SectorLayout::from_sector_order(const ComplexVector& v) const {
  if (v.size() != dim()) throw ConfigError("sector layout: vector dimension mismatch");
  ComplexVector out(dim());
  for (Index i = 0; i < dim(); ++i) out(static_cast<Index>(ordered_[static_cast<std::size_t>(i)])) = v(i);
  return out;
}

SparseMatrix SectorLayout::block(const SparseOperator& op, int to, int from) const {
  if (op.dim() != dim()) throw ConfigError("sector layout: operator dimension mismatch");
  std::vector<Triplet> entries;
  const SparseMatrix& m = op.matrix();
  // Row-major storage: walk the rows belonging to sector `to`.
  for (BasisConfig row : configs(to)) {
    for (SparseMatrix::InnerIterator it(m, static_cast<Index>(row)); it; ++it) {
      const auto col = static_cast<BasisConfig>(it.col());
      if (excitation_count(col) != from) continue;
      entries.emplace_back(local_index(row), local_index(col), it.value());
    }
  }
  SparseMatrix out(size(to), size(from));
  out.setFromTriplets(entries.begin(), entries.end());
  out.makeCompressed();
  return out;
}

}  // namespace kcsr
