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

// Computational basis of the periodic chain. Configuration `bits` has bit j
// set when site j is excited; sites are 0-based and neighbours wrap mod N.

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kcsr/types.hpp"

namespace kcsr {

using BasisConfig = std::uint64_t;

inline constexpr int kMaxSites = 24;

constexpr bool site_excited(BasisConfig bits, int site) {
  return ((bits >> site) & 1u) != 0;
}

constexpr int excitation_count(BasisConfig bits) { return std::popcount(bits); }

constexpr BasisConfig flip_site(BasisConfig bits, int site) {
  return bits ^ (BasisConfig{1} << site);
}

constexpr Index basis_dimension(int n_sites) { return Index{1} << n_sites; }

/// Number of excited nearest neighbours of `site`, i.e. the channel index
/// through which that site would emit.
constexpr int neighbor_count(BasisConfig bits, int site, int n_sites) {
  const int left = (site + n_sites - 1) % n_sites;
  const int right = (site + 1) % n_sites;
  return static_cast<int>(site_excited(bits, left)) +
         static_cast<int>(site_excited(bits, right));
}

/// Number of excited nearest-neighbour bonds, periodic wrap included.
constexpr int excited_bond_count(BasisConfig bits, int n_sites) {
  int bonds = 0;
  for (int j = 0; j < n_sites; ++j) {
    bonds += static_cast<int>(site_excited(bits, j) &&
                              site_excited(bits, (j + 1) % n_sites));
  }
  return bonds;
}

/// Encodes per-site occupations (site 0 first) into a configuration.
BasisConfig encode_config(const std::vector<bool>& excited);

/// Inverse of encode_config.
std::vector<bool> decode_config(BasisConfig bits, int n_sites);

/// Parses strings like "1100" or "uudd" (site 0 first).
BasisConfig parse_config_string(std::string_view text);

/// Renders a configuration as "1100" (site 0 first).
std::string config_to_string(BasisConfig bits, int n_sites);

}  // namespace kcsr
