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

#include <doctest.h>

#include <cmath>
#include <random>

#include "kcsr/analysis.hpp"
#include "kcsr/lindblad.hpp"
#include "oracle.hpp"

using namespace kcsr;

namespace {

ChainParams chain(int n, double j = 0.2) {
  ChainParams p;
  p.n_sites = n;
  p.j_int = j;
  return p;
}

std::vector<oracle::Channel> oracle_channels(const Model& model) {
  std::vector<oracle::Channel> out;
  for (const auto& c : model.channels) out.push_back({c.rate, c.op.to_dense()});
  return out;
}

DensityMatrix random_density(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Index d = basis_dimension(n);
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  DensityMatrix rho;
  rho.data = a * a.adjoint();
  rho.data /= rho.data.trace();
  return rho;
}

}  // namespace

TEST_CASE("rhs of vacuum and inverted states") {
  const Model m3 = make_kc_model(chain(3));
  const DensityMatrix vac = DensityMatrix::from_pure(PureState::vacuum(3));
  CHECK(lindblad_rhs(vac, m3.hamiltonian, m3.channels).cwiseAbs().maxCoeff() == 0.0);

  const DensityMatrix full = DensityMatrix::from_pure(PureState::fully_inverted(3));
  const ComplexMatrix d = lindblad_rhs(full, m3.hamiltonian, m3.channels);
  double dn = 0.0;
  for (Index i = 0; i < d.rows(); ++i) dn += excitation_count(static_cast<BasisConfig>(i)) * d(i, i).real();
  CHECK(dn == doctest::Approx(-3.0 * m3.channels[2].rate).epsilon(1e-14));
}

TEST_CASE("rhs trace vanishes and matches the dense oracle") {
  const Model m4 = make_kc_model(chain(4));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DensityMatrix rho = random_density(4, seed);
    const ComplexMatrix d = lindblad_rhs(rho, m4.hamiltonian, m4.channels);
    CHECK(std::abs(d.trace()) < 1e-12);
    const oracle::Mat ref = oracle::apply_liouvillian(rho.data, oracle::hamiltonian(4, 1.0, 0.2), oracle_channels(m4));
    CHECK((d - ref).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("dense liouvillian matches the Kronecker construction") {
  for (int n = 3; n <= 4; ++n) {
    const Model model = make_kc_model(chain(n, 0.7));
    const oracle::Mat ref = oracle::liouvillian(oracle::hamiltonian(n, 1.0, 0.7), oracle_channels(model));
    CHECK((dense_liouvillian(model) - ref).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("blocked liouvillian equals the dense rhs on every coherence order") {
  for (auto mode : {EmissionMode::kc, EmissionMode::dicke}) {
    const Model model = mode == EmissionMode::kc ? make_kc_model(chain(5)) : make_dicke_model(chain(5), 1.3);
    std::vector<int> orders;
    for (int o = -5; o <= 5; ++o) orders.push_back(o);
    const BlockedLiouvillian blocked(model, orders);
    const DensityMatrix rho = random_density(5, 11);
    ComplexVector dx(blocked.packed_size());
    blocked.apply(blocked.pack(rho), dx);
    const ComplexMatrix ref = lindblad_rhs(rho, model.hamiltonian, model.channels);
    CHECK((blocked.unpack(dx, 0.0).data - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("coherence orders of simple states") {
  CHECK(coherence_orders(DensityMatrix::from_pure(PureState::fully_inverted(4))) == std::vector<int>{0});
  PureState psi;
  psi.amplitudes = ComplexVector::Zero(8);
  psi.amplitudes(0) = psi.amplitudes(7) = 1.0 / std::sqrt(2.0);
  CHECK(coherence_orders(DensityMatrix::from_pure(psi)) == std::vector<int>{-3, 0, 3});
}

TEST_CASE("zero-time evolution returns the initial state") {
  const Model model = make_kc_model(chain(4));
  EvolutionConfig cfg;
  cfg.t_max = 0.0;
  const DensityMatrix rho0 = DensityMatrix::from_pure(PureState::fully_inverted(4));
  const MasterRun run = evolve_master(rho0, model, cfg);
  REQUIRE(run.samples.size() == 1);
  CHECK((run.final_state.data - rho0.data).cwiseAbs().maxCoeff() == 0.0);
  CHECK(run.samples[0].obs.n_total == 4.0);
}

TEST_CASE("two-atom collective cascade") {
  const double gamma = 1.7;
  const Model model = make_dicke_model(chain(2), gamma);
  EvolutionConfig cfg;
  cfg.t_max = 4.0;
  cfg.sample_interval = 0.1;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  const MasterRun run = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(2)), model, cfg);
  for (const auto& s : run.samples) {
    CHECK(std::abs(s.obs.n_total - oracle::cascade_two_atoms(gamma, s.obs.time)) < 1e-6);
    CHECK(std::abs(s.obs.intensity_total - oracle::cascade_two_atoms_intensity(gamma, s.obs.time)) < 1e-6);
  }
}

TEST_CASE("evolution matches the dense matrix exponential") {
  for (int n = 3; n <= 4; ++n) {
    const Model model = make_kc_model(chain(n, 0.5));
    const double t = 5.0 / model.channels[0].rate;
    EvolutionConfig cfg;
    cfg.t_max = t;
    cfg.sample_interval = t;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-13;
    const oracle::Mat rho0 = oracle::inverted_state(n);
    const MasterRun run = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(n)), model, cfg);
    const oracle::Mat ref = oracle::propagate(oracle::liouvillian(oracle::hamiltonian(n, 1.0, 0.5), oracle_channels(model)), rho0, t);
    CHECK((run.final_state.data - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("long-time limit at N = 3 matches the Liouvillian kernel") {
  const Model model = make_kc_model(chain(3));
  const oracle::Mat ss = oracle::steady_projection(oracle::hamiltonian(3, 1.0, 0.2), oracle_channels(model), oracle::inverted_state(3));
  EvolutionConfig cfg;
  cfg.t_max = 40.0;
  cfg.sample_interval = 1.0;
  const MasterRun run = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(3)), model, cfg);
  CHECK(std::abs(run.samples.back().obs.n_total - oracle::excitations(3, ss)) < 1e-8);
}

TEST_CASE("steady-state detection") {
  const Model model = make_kc_model(chain(4));
  EvolutionConfig cfg;
  cfg.t_max = 1.0;
  cfg.sample_interval = 0.1;
  const MasterRun vac = evolve_master(DensityMatrix::from_pure(PureState::vacuum(4)), model, cfg);
  REQUIRE(vac.steady.reached);
  CHECK(vac.steady.time == 0.0);

  EvolutionConfig long_cfg;
  long_cfg.t_max = 30.0;
  long_cfg.sample_interval = 0.1;
  for (int n = 3; n <= 4; ++n) {
    const MasterRun d = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(n)), make_dicke_model(chain(n), 1.0), long_cfg);
    CHECK(d.steady.reached);
    CHECK(d.samples.back().obs.n_total < 1e-3 * n);
  }
  const MasterRun kc6 = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(6)), make_kc_model(chain(6)), long_cfg);
  CHECK(kc6.steady.reached);
  CHECK(kc6.samples.back().obs.n_total > 0.0);

  // A window longer than the series never fires.
  CHECK_FALSE(detect_steady_state(vac.samples, 1e-6, static_cast<int>(vac.samples.size()) + 1).reached);
}

TEST_CASE("invariants recorded along a run") {
  EvolutionConfig cfg;
  cfg.t_max = 3.0;
  cfg.sample_interval = 0.05;
  const MasterRun run = evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(6)), make_kc_model(chain(6)), cfg);
  for (const auto& s : run.samples) {
    CHECK(s.trace_error < 1e-9);
    CHECK(s.hermiticity_error < 1e-10);
    CHECK(s.min_eigenvalue > -1e-8);
    double nk = 0.0;
    for (double v : s.obs.momentum_occ) nk += v;
    CHECK(std::abs(nk - s.obs.n_total) < 1e-8);
  }
}

TEST_CASE("sample grid") {
  CHECK(sample_times(0.0, 0.0, 0.1) == std::vector<double>{0.0});
  const auto t = sample_times(0.0, 1.0, 0.3);
  REQUIRE(t.size() == 5);
  CHECK(t.back() == 1.0);
  CHECK_THROWS(evolve_master(DensityMatrix::from_pure(PureState::fully_inverted(3)), make_kc_model(chain(3)),
                             EvolutionConfig{.rel_tol = -1.0}));
}
