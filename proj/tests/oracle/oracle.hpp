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

// Independent dense reference implementation used by the tests. Operators are
// assembled from Kronecker products of 2x2 site matrices and never touch the
// library's sparse builders, sector layouts or integrators.
//
// Basis index = sum_j b_j 2^j, so site 0 is the rightmost Kronecker factor.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat site_op(int n_sites, int site, const Mat& op) {
  Mat out = Mat::Identity(1, 1);
  for (int s = n_sites - 1; s >= 0; --s) {
    const Mat factor = s == site ? op : Mat::Identity(2, 2);
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

inline Mat lowering_2x2() {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

inline Mat number_2x2() {
  Mat m = Mat::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

inline Mat sigma_minus(int n, int j) { return site_op(n, j, lowering_2x2()); }
inline Mat number(int n, int j) { return site_op(n, j, number_2x2()); }

inline Mat hamiltonian(int n, double delta, double j_int) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat h = Mat::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    h += delta * number(n, j);
    h += j_int * number(n, j) * number(n, (j + 1) % n);
  }
  return h;
}

/// Neighbourhood projector of site j selecting `xi` excited neighbours.
inline Mat projector(int n, int j, int xi) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const Mat id = Mat::Identity(d, d);
  const Mat nl = number(n, (j + n - 1) % n);
  const Mat nr = number(n, (j + 1) % n);
  if (xi == 0) return (id - nl) * (id - nr);
  if (xi == 1) return nl * (id - nr) + (id - nl) * nr;
  return nl * nr;
}

inline Mat constrained_lowering(int n, int xi) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat s = Mat::Zero(d, d);
  for (int j = 0; j < n; ++j) s += projector(n, j, xi) * sigma_minus(n, j);
  return s;
}

inline Mat collective_lowering(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat s = Mat::Zero(d, d);
  for (int j = 0; j < n; ++j) s += sigma_minus(n, j);
  return s;
}

inline Mat momentum_lowering(int n, int m) {
  const Eigen::Index d = Eigen::Index{1} << n;
  const double k = 2.0 * M_PI * m / n;
  Mat s = Mat::Zero(d, d);
  for (int j = 0; j < n; ++j) s += std::exp(Complex(0.0, -k * j)) * sigma_minus(n, j);
  return s / std::sqrt(static_cast<double>(n));
}

struct Channel {
  double rate;
  Mat op;
};

inline std::vector<Channel> kc_channels(int n, double delta, double j_int, double prefactor) {
  std::vector<Channel> out;
  for (int xi = 0; xi < 3; ++xi) {
    const double w = delta + xi * j_int;
    out.push_back({prefactor * w * w * w, constrained_lowering(n, xi)});
  }
  return out;
}

/// Column-stacked superoperator: vec(A X B) = (B^T kron A) vec(X).
inline Mat liouvillian(const Mat& h, const std::vector<Channel>& channels) {
  const Eigen::Index d = h.rows();
  const Mat id = Mat::Identity(d, d);
  const Complex i(0.0, 1.0);
  Mat l = -i * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (const auto& c : channels) {
    const Mat k = c.op.adjoint() * c.op;
    l += c.rate * (Eigen::kroneckerProduct(c.op.conjugate(), c.op).eval() -
                   0.5 * Eigen::kroneckerProduct(id, k).eval() - 0.5 * Eigen::kroneckerProduct(k.transpose(), id).eval());
  }
  return l;
}

inline Mat apply_liouvillian(const Mat& rho, const Mat& h, const std::vector<Channel>& channels) {
  const Complex i(0.0, 1.0);
  Mat out = -i * (h * rho - rho * h);
  for (const auto& c : channels) {
    const Mat k = c.op.adjoint() * c.op;
    out += c.rate * (c.op * rho * c.op.adjoint() - 0.5 * (k * rho + rho * k));
  }
  return out;
}

inline Mat propagate(const Mat& l, const Mat& rho0, double t) {
  const Eigen::Index d = rho0.rows();
  const Vec v0 = Eigen::Map<const Vec>(rho0.data(), d * d);
  const Vec v = (l * t).exp() * v0;
  return Eigen::Map<const Mat>(v.data(), d, d);
}

inline Mat inverted_state(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat rho = Mat::Zero(d, d);
  rho(d - 1, d - 1) = 1.0;
  return rho;
}

inline int popcount(Eigen::Index x) { return __builtin_popcountll(static_cast<unsigned long long>(x)); }

/// Long-time limit of rho0 under the Liouvillian, restricted to entries
/// (a, b) with equal excitation number (enough for any popcount-diagonal
/// start): rho0 projected onto the kernel along the range.
inline Mat steady_projection(const Mat& h, const std::vector<Channel>& channels, const Mat& rho0) {
  const Eigen::Index d = h.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> keys;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(d * d), -1);
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      if (popcount(a) != popcount(b)) continue;
      slot[static_cast<std::size_t>(a + d * b)] = static_cast<Eigen::Index>(keys.size());
      keys.emplace_back(a, b);
    }
  }
  const auto m = static_cast<Eigen::Index>(keys.size());
  Mat l = Mat::Zero(m, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    Mat e = Mat::Zero(d, d);
    e(keys[static_cast<std::size_t>(col)].first, keys[static_cast<std::size_t>(col)].second) = 1.0;
    const Mat out = apply_liouvillian(e, h, channels);
    for (Eigen::Index row = 0; row < m; ++row) l(row, col) = out(keys[static_cast<std::size_t>(row)].first, keys[static_cast<std::size_t>(row)].second);
  }
  Vec v0(m);
  for (Eigen::Index r = 0; r < m; ++r) v0(r) = rho0(keys[static_cast<std::size_t>(r)].first, keys[static_cast<std::size_t>(r)].second);

  // P0 = R (L^H R)^{-1} L^H with R, L spanning the right and left kernels;
  // the zero eigenvalue of a Lindbladian is semisimple.
  Eigen::BDCSVD<Mat> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index k = 0;
  while (k < m && sv(m - 1 - k) < 1e-9 * sv(0)) ++k;
  const Mat right = svd.matrixV().rightCols(k);
  const Mat left = svd.matrixU().rightCols(k);
  const Vec out = right * (left.adjoint() * right).partialPivLu().solve(left.adjoint() * v0);
  Mat rho = Mat::Zero(d, d);
  for (Eigen::Index r = 0; r < m; ++r) rho(keys[static_cast<std::size_t>(r)].first, keys[static_cast<std::size_t>(r)].second) = out(r);
  return rho;
}

inline double expectation(const Mat& op, const Mat& rho) { return (op * rho).trace().real(); }

inline double excitations(int n, const Mat& rho) {
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += expectation(number(n, j), rho);
  return total;
}

/// Two-atom collective cascade |2> -> |1> -> |0>, both steps at rate 2 gamma:
/// n(t) = (2 + 2 gamma t) e^{-2 gamma t}.
inline double cascade_two_atoms(double gamma, double t) { return (2.0 + 2.0 * gamma * t) * std::exp(-2.0 * gamma * t); }

/// Matching intensity gamma (2 p_2 + 2 p_1) = -dn/dt.
inline double cascade_two_atoms_intensity(double gamma, double t) {
  return 2.0 * gamma * (1.0 + 2.0 * gamma * t) * std::exp(-2.0 * gamma * t);
}

}  // namespace oracle
