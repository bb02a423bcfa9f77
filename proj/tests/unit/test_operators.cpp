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

#include "kcsr/basis.hpp"
#include "kcsr/operators.hpp"
#include "oracle.hpp"

using namespace kcsr;

namespace {

ChainParams chain(int n, double delta = 1.0, double j = 0.2) {
  ChainParams p;
  p.n_sites = n;
  p.delta = delta;
  p.j_int = j;
  return p;
}

Complex entry(const SparseOperator& op, BasisConfig row, BasisConfig col) {
  return op.matrix().coeff(static_cast<Index>(row), static_cast<Index>(col));
}

ComplexVector apply_to(const SparseOperator& op, int n, const char* bits) {
  ComplexVector v = ComplexVector::Zero(basis_dimension(n));
  v(static_cast<Index>(parse_config_string(bits))) = 1.0;
  return op.apply(v);
}

ComplexVector ket_sum(int n, std::initializer_list<const char*> configs) {
  ComplexVector v = ComplexVector::Zero(basis_dimension(n));
  for (const char* c : configs) v(static_cast<Index>(parse_config_string(c))) += 1.0;
  return v;
}

}  // namespace

TEST_CASE("hamiltonian diagonal values") {
  const auto h3 = build_hamiltonian(chain(3));
  CHECK(entry(h3, 0b111, 0b111).real() == doctest::Approx(3.6).epsilon(1e-15));
  CHECK(h3.is_diagonal());
  for (int n = 3; n <= 6; ++n) CHECK(std::abs(entry(build_hamiltonian(chain(n)), 0, 0)) == 0.0);
  const auto h4 = build_hamiltonian(chain(4, 1.0, 0.5));
  CHECK(entry(h4, parse_config_string("1100"), parse_config_string("1100")).real() == doctest::Approx(2.5));
}

TEST_CASE("neighbor counts") {
  CHECK(neighbor_count(parse_config_string("111"), 0, 3) == 2);
  CHECK(neighbor_count(parse_config_string("010"), 1, 3) == 0);
  CHECK(neighbor_count(parse_config_string("1100"), 1, 4) == 1);
}

TEST_CASE("constrained jump actions") {
  const auto s2 = build_constrained_jump(chain(3), 2);
  CHECK((apply_to(s2.op, 3, "111") - ket_sum(3, {"011", "101", "110"})).norm() == 0.0);
  const auto s1 = build_constrained_jump(chain(3), 1);
  CHECK(apply_to(s1.op, 3, "111").norm() == 0.0);
  const auto s0 = build_constrained_jump(chain(4), 0);
  CHECK((apply_to(s0.op, 4, "1010") - ket_sum(4, {"0010", "1000"})).norm() == 0.0);
  CHECK(s2.rate == doctest::Approx(std::pow(1.4, 3)).epsilon(1e-15));
  CHECK_THROWS_AS(build_constrained_jump(chain(3), 3), ConfigError);
}

TEST_CASE("collective lowering") {
  const auto s = build_collective_lowering(chain(2));
  CHECK((apply_to(s, 2, "11") - ket_sum(2, {"01", "10"})).norm() == 0.0);
  CHECK(apply_to(s, 2, "00").norm() == 0.0);
  for (int n = 3; n <= 7; ++n) {
    const auto p = chain(n);
    const auto sum = build_constrained_jump(p, 0).op + build_constrained_jump(p, 1).op + build_constrained_jump(p, 2).op;
    CHECK((sum - build_collective_lowering(p)).max_abs() == 0.0);
  }
}

TEST_CASE("momentum lowering") {
  for (int n : {2, 3, 5}) {
    const auto p = chain(n);
    const SparseOperator k0 = build_momentum_lowering(p, 0.0);
    CHECK((k0 - Complex(1.0 / std::sqrt(n)) * build_collective_lowering(p)).max_abs() < 1e-15);
    ComplexVector full = ComplexVector::Zero(basis_dimension(n));
    full(basis_dimension(n) - 1) = 1.0;
    for (double k : momentum_grid(n)) CHECK(build_momentum_lowering(p, k).apply(full).norm() == doctest::Approx(1.0));
  }
  // k = pi at N = 2: alternating signs (-1)^j.
  const auto pi2 = build_momentum_lowering(chain(2), M_PI);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(entry(pi2, 0b10, 0b11) - Complex(r)) < 1e-15);
  CHECK(std::abs(entry(pi2, 0b01, 0b11) + Complex(r)) < 1e-15);
  CHECK_THROWS_AS(build_momentum_lowering(chain(4), 0.3), ConfigError);
}

TEST_CASE("operators match the Kronecker-product oracle") {
  for (int n = 3; n <= 6; ++n) {
    const auto p = chain(n, 1.3, 0.45);
    CHECK((build_hamiltonian(p).to_dense() - oracle::hamiltonian(n, 1.3, 0.45)).cwiseAbs().maxCoeff() < 1e-14);
    for (int xi = 0; xi < 3; ++xi) {
      CHECK((build_constrained_jump(p, xi).op.to_dense() - oracle::constrained_lowering(n, xi)).cwiseAbs().maxCoeff() == 0.0);
    }
    for (int m = 0; m < n; ++m) {
      CHECK((build_momentum_lowering_mode(p, m).to_dense() - oracle::momentum_lowering(n, m)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("eigenoperator identity") {
  const auto p = chain(4);
  const auto h = build_hamiltonian(p);
  CHECK(verify_eigenoperator(h, build_constrained_jump(p, 1)) < 1e-12);
  // Brute-force dense commutator at N = 4.
  const auto hd = oracle::hamiltonian(4, 1.0, 0.2);
  const auto s1 = oracle::constrained_lowering(4, 1);
  CHECK((hd * s1 - s1 * hd + 1.2 * s1).cwiseAbs().maxCoeff() < 1e-12);

  const auto flat = chain(3, 1.0, 0.0);
  for (int xi = 0; xi < 3; ++xi) {
    const auto ch = build_constrained_jump(flat, xi);
    CHECK(ch.omega == 1.0);
    CHECK(verify_eigenoperator(build_hamiltonian(flat), ch) < 1e-12);
  }
  for (int xi = 0; xi < 3; ++xi) {
    const auto ch = build_constrained_jump(p, xi);
    const double res = eigenoperator_residual(h, ch.op, ch.omega + p.j_int);
    CHECK(res >= p.j_int * ch.op.max_abs() * (1.0 - 1e-12));
  }
}

TEST_CASE("eigenoperator identity over random couplings") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> delta(0.2, 3.0), j(0.0, 2.0);
  for (int n = 3; n <= 8; ++n) {
    for (int draw = 0; draw < 20; ++draw) {
      const auto p = chain(n, delta(rng), j(rng));
      const auto model = make_kc_model(p);
      for (const auto& ch : model.channels) CHECK(verify_eigenoperator(model.hamiltonian, ch) < 1e-12);
    }
  }
}

TEST_CASE("models") {
  const auto kc = make_kc_model(chain(5, 1.0, 1.0));
  REQUIRE(kc.channels.size() == 3);
  CHECK(kc.channels[2].rate / kc.channels[0].rate == 27.0);
  const auto dicke = make_dicke_model(chain(5), 2.5);
  REQUIRE(dicke.channels.size() == 1);
  CHECK(dicke.channels[0].xi == kCollectiveChannel);
  CHECK(dicke.channels[0].rate == 2.5);
  CHECK_THROWS_AS(make_kc_model(chain(2)), ConfigError);
  CHECK_THROWS_AS(make_dicke_model(chain(4), -1.0), ConfigError);
}

TEST_CASE("basis helpers") {
  CHECK(parse_config_string("uudd") == parse_config_string("1100"));
  CHECK(config_to_string(parse_config_string("1010"), 4) == "1010");
  CHECK(excited_bond_count(parse_config_string("1101"), 4) == 2);
  CHECK_THROWS_AS(parse_config_string("12"), ConfigError);
}
