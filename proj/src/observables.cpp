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

#include "kcsr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace kcsr {

namespace {

void require_dim(Index state_dim, Index op_dim) {
  if (state_dim != op_dim) {
    throw ConfigError("dimension mismatch: state " + std::to_string(state_dim) + ", operator " +
                      std::to_string(op_dim));
  }
}

struct SiteSplit {
  std::vector<int> keep;
  std::vector<int> rest;
};

SiteSplit split_sites(int n_sites, const std::vector<int>& keep_sites) {
  if (keep_sites.empty()) throw ConfigError("partial trace: keep set is empty");
  SiteSplit split;
  split.keep = keep_sites;
  std::sort(split.keep.begin(), split.keep.end());
  if (std::adjacent_find(split.keep.begin(), split.keep.end()) != split.keep.end()) {
    throw ConfigError("partial trace: duplicate site in keep set");
  }
  if (split.keep.front() < 0 || split.keep.back() >= n_sites) {
    throw ConfigError("partial trace: site outside [0, N)");
  }
  for (int j = 0; j < n_sites; ++j) {
    if (!std::binary_search(split.keep.begin(), split.keep.end(), j)) split.rest.push_back(j);
  }
  return split;
}

// Gathers the bits listed in `sites` into a compact index.
Index gather(BasisConfig bits, const std::vector<int>& sites) {
  Index out = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (site_excited(bits, sites[i])) out |= Index{1} << i;
  }
  return out;
}

}  // namespace

double excitation_number(const PureState& psi) {
  double n = 0.0;
  for (Index b = 0; b < psi.dim(); ++b) {
    n += std::norm(psi.amplitudes(b)) * excitation_count(static_cast<BasisConfig>(b));
  }
  return n;
}

double excitation_number(const DensityMatrix& rho) {
  double n = 0.0;
  for (Index b = 0; b < rho.dim(); ++b) n += rho.data(b, b).real() * excitation_count(static_cast<BasisConfig>(b));
  return n;
}

double lowering_occupation(const PureState& psi, const SparseOperator& op) {
  require_dim(psi.dim(), op.dim());
  return (op.matrix() * psi.amplitudes).squaredNorm();
}

double lowering_occupation(const DensityMatrix& rho, const SparseOperator& op) {
  require_dim(rho.dim(), op.dim());
  const SparseMatrix& a = op.matrix();
  const ComplexMatrix t = a * rho.data;
  Complex acc = 0.0;
  for (Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) acc += t(r, it.col()) * std::conj(it.value());
  }
  return acc.real();
}

double channel_intensity(const PureState& psi, const ChannelSpec& channel) {
  return channel.rate * lowering_occupation(psi, channel.op);
}

double channel_intensity(const DensityMatrix& rho, const ChannelSpec& channel) {
  return channel.rate * lowering_occupation(rho, channel.op);
}

double momentum_occupation(const PureState& psi, double k) {
  ChainParams params;
  params.n_sites = sites_from_dimension(psi.dim());
  return lowering_occupation(psi, build_momentum_lowering(params, k));
}

double momentum_occupation(const DensityMatrix& rho, double k) {
  ChainParams params;
  params.n_sites = sites_from_dimension(rho.dim());
  return lowering_occupation(rho, build_momentum_lowering(params, k));
}

ComplexMatrix partial_trace(const PureState& psi, const std::vector<int>& keep_sites) {
  const int n = sites_from_dimension(psi.dim());
  const SiteSplit split = split_sites(n, keep_sites);
  const Index keep_dim = Index{1} << split.keep.size();
  const Index rest_dim = Index{1} << split.rest.size();
  ComplexMatrix m(keep_dim, rest_dim);
  for (Index b = 0; b < psi.dim(); ++b) {
    const auto bits = static_cast<BasisConfig>(b);
    m(gather(bits, split.keep), gather(bits, split.rest)) = psi.amplitudes(b);
  }
  return m * m.adjoint();
}

ComplexMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep_sites) {
  const int n = sites_from_dimension(rho.dim());
  const SiteSplit split = split_sites(n, keep_sites);
  if (split.rest.empty()) return rho.data;
  const Index keep_dim = Index{1} << split.keep.size();
  ComplexMatrix out = ComplexMatrix::Zero(keep_dim, keep_dim);
  for (Index r = 0; r < rho.dim(); ++r) {
    const auto rb = static_cast<BasisConfig>(r);
    const Index rest_r = gather(rb, split.rest);
    const Index keep_r = gather(rb, split.keep);
    for (Index c = 0; c < rho.dim(); ++c) {
      const auto cb = static_cast<BasisConfig>(c);
      if (gather(cb, split.rest) != rest_r) continue;
      out(keep_r, gather(cb, split.keep)) += rho.data(r, c);
    }
  }
  return out;
}

double von_neumann_entropy(const ComplexMatrix& rho_reduced) {
  const Complex tr = rho_reduced.trace();
  if (std::abs(tr - 1.0) > 1e-6) {
    throw InvariantError("entropy: reduced matrix trace deviates from 1 by " +
                         std::to_string(std::abs(tr - 1.0)));
  }
  const ComplexMatrix herm = 0.5 * (rho_reduced + rho_reduced.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lambda : solver.eigenvalues()) {
    if (lambda < -1e-10) throw InvariantError("entropy: negative eigenvalue " + std::to_string(lambda));
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

std::vector<int> halfchain_sites(int n_sites) {
  std::vector<int> sites(static_cast<std::size_t>(n_sites / 2));
  for (int j = 0; j < n_sites / 2; ++j) sites[static_cast<std::size_t>(j)] = j;
  return sites;
}

double entanglement_entropy(const PureState& psi, const std::vector<int>& keep_sites) {
  return von_neumann_entropy(partial_trace(psi, keep_sites));
}

void assign_intensities(ObservableRecord& record, EmissionMode mode,
                        const std::vector<ChannelSpec>& channels, const std::vector<double>& values) {
  if (mode == EmissionMode::kc) {
    double total = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      record.intensity[static_cast<std::size_t>(channels[c].xi)] = values[c];
      total += values[c];
    }
    record.intensity_total = total;
  } else {
    record.intensity = {kNaN, kNaN, kNaN};
    record.intensity_total = values.empty() ? 0.0 : values.front();
  }
}

ObservableSet::ObservableSet(const Model& model, std::vector<int> entropy_cut)
    : n_sites_(model.params.n_sites),
      mode_(model.mode),
      channels_(model.channels),
      cut_(std::move(entropy_cut)) {
  momentum_.reserve(static_cast<std::size_t>(n_sites_));
  for (int m = 0; m < n_sites_; ++m) momentum_.push_back(build_momentum_lowering_mode(model.params, m));
  if (!cut_.empty()) split_sites(n_sites_, cut_);
}

template <typename State>
ObservableRecord ObservableSet::measure_common(const State& state) const {
  ObservableRecord rec;
  rec.time = state.time;
  rec.n_total = excitation_number(state);
  std::vector<double> values;
  values.reserve(channels_.size());
  for (const auto& ch : channels_) values.push_back(channel_intensity(state, ch));
  assign_intensities(rec, mode_, channels_, values);
  rec.momentum_occ.reserve(momentum_.size());
  for (const auto& op : momentum_) rec.momentum_occ.push_back(lowering_occupation(state, op));
  return rec;
}

ObservableRecord ObservableSet::measure(const PureState& psi) const {
  ObservableRecord rec = measure_common(psi);
  if (!cut_.empty()) rec.entropy_halfchain = entanglement_entropy(psi, cut_);
  return rec;
}

ObservableRecord ObservableSet::measure(const DensityMatrix& rho) const { return measure_common(rho); }

}  // namespace kcsr
