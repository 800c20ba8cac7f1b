// Copyright 2026 The qmagic Authors
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


// Independent reference constructions used by the tests. Everything here
// works in the full 2^L space with explicit per-site operators, so it shares
// no code path with the sector routines under test.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qmagic/hamiltonian.hpp"
#include "qmagic/hilbert.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Dense = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Single-site operator on 1-based `site` of L spins. Bit (site-1) set means
// spin up. Codes: 'I', 'X', 'Y', 'Z', '+' (raise), '-' (lower).
inline Dense site_op(char code, int site, int L) {
  const std::size_t dim = std::size_t{1} << L;
  const std::uint32_t bit = 1U << (site - 1);
  Dense m = Dense::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const Complex i(0.0, 1.0);
  for (std::uint32_t x = 0; x < dim; ++x) {
    const bool up = x & bit;
    const auto col = static_cast<Eigen::Index>(x);
    const auto flip = static_cast<Eigen::Index>(x ^ bit);
    switch (code) {
      case 'I': m(col, col) = 1.0; break;
      case 'Z': m(col, col) = up ? 1.0 : -1.0; break;
      case 'X': m(flip, col) = 1.0; break;
      // Y|up> = i|down>, Y|down> = -i|up>
      case 'Y': m(flip, col) = up ? i : -i; break;
      case '+': if (!up) m(flip, col) = 1.0; break;
      case '-': if (up) m(flip, col) = 1.0; break;
      default: throw std::invalid_argument("site_op: unknown code");
    }
  }
  return m;
}

// Columns are the sector configurations, in the basis order.
inline Dense sector_isometry(const qmagic::SubspaceBasis& basis) {
  const auto full = static_cast<Eigen::Index>(std::size_t{1} << basis.sites());
  Dense p = Dense::Zero(full, static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) p(basis[i].bits, static_cast<Eigen::Index>(i)) = 1.0;
  return p;
}

// Periodic staggered XXZ chain; the field on site j carries (-1)^(j + offset).
inline Dense xxz_full(int L, double J, double V, double W, int offset) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << L);
  Dense h = Dense::Zero(dim, dim);
  for (int j = 1; j <= L; ++j) {
    const int k = j % L + 1;
    h += 0.5 * J * (site_op('+', j, L) * site_op('-', k, L) + site_op('-', j, L) * site_op('+', k, L));
    h += 0.25 * V * site_op('Z', j, L) * site_op('Z', k, L);
    h += 0.5 * W * (((j + offset) % 2 == 0) ? 1.0 : -1.0) * site_op('Z', j, L);
  }
  return h;
}

// Jordan-Wigner string prod_{l < site} Z_l (1-based).
inline Dense jw_string(int site, int L) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << L);
  Dense s = Dense::Identity(dim, dim);
  for (int l = 1; l < site; ++l) s = s * site_op('Z', l, L);
  return s;
}

// L^{-3/2} sum_{ijkl} J_{ij,kl} (S^i s+_i)(S^j s+_j)(S^k s-_k)(S^l s-_l), with
// the coupling tensor assembled here from the canonical entries.
inline Dense syk_full(const qmagic::SykCouplings& c) {
  const int L = c.sites;
  std::vector<Complex> t(static_cast<std::size_t>(L * L * L * L), Complex(0.0, 0.0));
  auto at = [&](int i, int j, int k, int l) -> Complex& { return t[((i * L + j) * L + k) * L + l]; };
  for (const auto& e : c.entries) {
    for (int swap_ij = 0; swap_ij < 2; ++swap_ij) {
      for (int swap_kl = 0; swap_kl < 2; ++swap_kl) {
        const int i = swap_ij ? e.j : e.i, j = swap_ij ? e.i : e.j;
        const int k = swap_kl ? e.l : e.k, l = swap_kl ? e.k : e.l;
        const double sign = (swap_ij ^ swap_kl) ? -1.0 : 1.0;
        at(i, j, k, l) = sign * e.value;
        at(k, l, i, j) = sign * std::conj(e.value);
      }
    }
  }
  std::vector<Dense> raise(static_cast<std::size_t>(L)), lower(static_cast<std::size_t>(L));
  for (int s = 0; s < L; ++s) {
    raise[static_cast<std::size_t>(s)] = jw_string(s + 1, L) * site_op('+', s + 1, L);
    lower[static_cast<std::size_t>(s)] = jw_string(s + 1, L) * site_op('-', s + 1, L);
  }
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << L);
  Dense h = Dense::Zero(dim, dim);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k)
        for (int l = 0; l < L; ++l) {
          const Complex v = at(i, j, k, l);
          if (v == Complex(0.0, 0.0)) continue;
          h += v * raise[static_cast<std::size_t>(i)] * raise[static_cast<std::size_t>(j)] *
               lower[static_cast<std::size_t>(k)] * lower[static_cast<std::size_t>(l)];
        }
  return h / std::pow(static_cast<double>(L), 1.5);
}

// <psi|P|psi> for every one of the 4^L strings, string index sum_j code_j 4^(j-1)
// with codes 0..3 = I, X, Y, Z.
inline std::vector<double> all_pauli_expectations(const Vec& psi, int L) {
  static const char codes[4] = {'I', 'X', 'Y', 'Z'};
  std::vector<std::vector<Dense>> ops(static_cast<std::size_t>(L));
  for (int j = 1; j <= L; ++j)
    for (char c : codes) ops[static_cast<std::size_t>(j - 1)].push_back(site_op(c, j, L));
  const std::size_t n = std::size_t{1} << (2 * L);
  std::vector<double> out(n);
  for (std::size_t p = 0; p < n; ++p) {
    Vec v = psi;
    for (int j = 0; j < L; ++j) {
      const auto code = (p >> (2 * j)) & 3U;
      if (code) v = ops[static_cast<std::size_t>(j)][code] * v;
    }
    const Complex e = psi.dot(v);
    out[p] = e.real();
  }
  return out;
}

inline double sre_from_expectations(const std::vector<double>& a, int L) {
  double s4 = 0.0;
  for (double x : a) s4 += x * x * x * x;
  return -std::log(s4 / std::pow(2.0, L));
}

// Gauss-Hermite nodes and weights for the standard normal, from the
// eigen-decomposition of the Jacobi matrix of the probabilists' polynomials.
inline void gauss_hermite_normal(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) weights[static_cast<std::size_t>(k)] = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
}

}  // namespace oracle
