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

#include "kcsr/observables.hpp"
#include "oracle.hpp"

using namespace kcsr;

namespace {

ChainParams chain(int n) {
  ChainParams p;
  p.n_sites = n;
  return p;
}

PureState superposition(int n, const char* a, const char* b, double sign) {
  PureState psi;
  psi.amplitudes = ComplexVector::Zero(basis_dimension(n));
  psi.amplitudes(static_cast<Index>(parse_config_string(a))) = 1.0 / std::sqrt(2.0);
  psi.amplitudes(static_cast<Index>(parse_config_string(b))) = sign / std::sqrt(2.0);
  return psi;
}

}  // namespace

TEST_CASE("channel intensities") {
  for (int n = 3; n <= 7; ++n) {
    const auto p = chain(n);
    const auto full = PureState::fully_inverted(n);
    const auto vac = PureState::vacuum(n);
    const auto s2 = build_constrained_jump(p, 2);
    CHECK(channel_intensity(full, s2) == doctest::Approx(s2.rate * n).epsilon(1e-14));
    for (int xi = 0; xi < 2; ++xi) CHECK(channel_intensity(full, build_constrained_jump(p, xi)) == 0.0);
    for (int xi = 0; xi < 3; ++xi) CHECK(channel_intensity(vac, build_constrained_jump(p, xi)) == 0.0);
    CHECK(channel_intensity(DensityMatrix::from_pure(full), s2) == doctest::Approx(s2.rate * n).epsilon(1e-14));
  }
}

TEST_CASE("excitation number") {
  CHECK(excitation_number(PureState::fully_inverted(5)) == 5.0);
  CHECK(excitation_number(PureState::vacuum(5)) == 0.0);
  CHECK(excitation_number(superposition(2, "10", "01", 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("momentum occupations") {
  for (int n : {3, 4, 6}) {
    for (double k : momentum_grid(n)) {
      CHECK(momentum_occupation(PureState::fully_inverted(n), k) == doctest::Approx(1.0));
      CHECK(momentum_occupation(PureState::vacuum(n), k) == 0.0);
    }
  }
  const auto singlet = superposition(2, "10", "01", -1.0);
  CHECK(std::abs(momentum_occupation(singlet, 0.0)) < 1e-15);
  CHECK(momentum_occupation(singlet, M_PI) == doctest::Approx(1.0));
}

TEST_CASE("partial trace and entropy") {
  PureState product = PureState::basis(2, parse_config_string("10"));
  const ComplexMatrix r = partial_trace(product, {0});
  CHECK(std::abs(r(1, 1) - 1.0) < 1e-15);
  CHECK(std::abs(r(0, 0)) < 1e-15);
  CHECK(von_neumann_entropy(r) == doctest::Approx(0.0));

  const auto bell = superposition(2, "10", "01", 1.0);
  const ComplexMatrix half = partial_trace(bell, {0});
  CHECK((half - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(von_neumann_entropy(half) == doctest::Approx(std::log(2.0)));
  for (int m = 1; m <= 4; ++m) {
    const Index d = Index{1} << m;
    const ComplexMatrix mixed = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    CHECK(von_neumann_entropy(mixed) == doctest::Approx(m * std::log(2.0)));
  }
  CHECK(halfchain_sites(7) == std::vector<int>{0, 1, 2});
}

TEST_CASE("partial trace agrees between pure and mixed representations") {
  PureState psi;
  psi.amplitudes = ComplexVector::Zero(32);
  for (Index i = 0; i < 32; ++i) psi.amplitudes(i) = Complex(std::sin(1.0 + i), std::cos(0.3 * i));
  psi.normalize();
  const ComplexMatrix a = partial_trace(psi, {1, 3});
  const ComplexMatrix b = partial_trace(DensityMatrix::from_pure(psi), {1, 3});
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(a.trace() - 1.0) < 1e-14);
  // Complementary cuts of a pure state carry the same entropy.
  CHECK(entanglement_entropy(psi, {1, 3}) == doctest::Approx(entanglement_entropy(psi, {0, 2, 4})));
}

TEST_CASE("observable set records") {
  const auto p = chain(4);
  const Model model = make_kc_model(p);
  const ObservableSet obs(model, halfchain_sites(4));
  const auto rec = obs.measure(PureState::fully_inverted(4));
  CHECK(rec.n_total == 4.0);
  CHECK(rec.intensity[2] == doctest::Approx(4 * model.channels[2].rate));
  CHECK(rec.intensity_total == doctest::Approx(rec.intensity[2]));
  double sum = 0.0;
  for (double v : rec.momentum_occ) sum += v;
  CHECK(sum == doctest::Approx(rec.n_total));
  CHECK(rec.entropy_halfchain == doctest::Approx(0.0));

  const Model dicke = make_dicke_model(p, 1.0);
  const auto drec = ObservableSet(dicke).measure(PureState::fully_inverted(4));
  CHECK(std::isnan(drec.intensity[0]));
  CHECK(drec.intensity_total == doctest::Approx(4.0));
  CHECK(std::isnan(drec.entropy_halfchain));
}
