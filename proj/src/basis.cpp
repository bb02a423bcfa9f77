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

#include "kcsr/basis.hpp"

namespace kcsr {

BasisConfig encode_config(const std::vector<bool>& excited) {
  if (excited.size() > static_cast<std::size_t>(kMaxSites)) {
    throw ConfigError("configuration longer than " + std::to_string(kMaxSites) + " sites");
  }
  BasisConfig bits = 0;
  for (std::size_t j = 0; j < excited.size(); ++j) {
    if (excited[j]) bits |= BasisConfig{1} << j;
  }
  return bits;
}

std::vector<bool> decode_config(BasisConfig bits, int n_sites) {
  std::vector<bool> out(static_cast<std::size_t>(n_sites));
  for (int j = 0; j < n_sites; ++j) out[static_cast<std::size_t>(j)] = site_excited(bits, j);
  return out;
}

BasisConfig parse_config_string(std::string_view text) {
  std::vector<bool> excited;
  for (char c : text) {
    switch (c) {
      case '1':
      case 'u':
      case 'U':
        excited.push_back(true);
        break;
      case '0':
      case 'd':
      case 'D':
        excited.push_back(false);
        break;
      default:
        throw ConfigError("invalid character '" + std::string(1, c) + "' in configuration '" +
                          std::string(text) + "'");
    }
  }
  return encode_config(excited);
}

std::string config_to_string(BasisConfig bits, int n_sites) {
  std::string out;
  out.reserve(static_cast<std::size_t>(n_sites));
  for (int j = 0; j < n_sites; ++j) out.push_back(site_excited(bits, j) ? '1' : '0');
  return out;
}

}  // namespace kcsr
