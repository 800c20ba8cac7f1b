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


#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "qmagic/hamiltonian.hpp"

using namespace qmagic;

namespace {

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qmagic_test_" + name);
}

}  // namespace

TEST_CASE("XXZ sector matrix equals the projected full-space chain") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int L : {4, 6, 8}) {
    auto basis = enumerate_basis(L);
    const auto P = oracle::sector_isometry(*basis);
    for (Stagger st : {Stagger::one_based, Stagger::zero_based}) {
      const XxzParams p{u(rng), u(rng), u(rng), st};
      const auto h = build_xxz(basis, p);
      const auto full = oracle::xxz_full(L, p.J, p.V, p.W, st == Stagger::one_based ? 0 : 1);
      CHECK(max_abs(h.dense - P.adjoint() * full * P) < 1e-12);
      REQUIRE(h.sparse);
      CHECK(max_abs(CMatrix(*h.sparse) - h.dense) == 0.0);
      // Nothing leaks out of the sector.
      const auto Q = CMatrix::Identity(full.rows(), full.cols()) - P * P.adjoint();
      CHECK(max_abs(Q * full * P) < 1e-12);
    }
  }
}

TEST_CASE("Neel diagonal element for both stagger origins") {
  auto basis = enumerate_basis(4);
  const double V = 0.7, W = 1.3;
  const auto neel = basis->rank(neel_config(4));
  const auto one = build_xxz(basis, {1.0, V, W, Stagger::one_based});
  CHECK(one.dense(neel, neel).real() == doctest::Approx(-V - 2.0 * W).epsilon(1e-14));
  const auto zero = build_xxz(basis, {1.0, V, W, Stagger::zero_based});
  CHECK(zero.dense(neel, neel).real() == doctest::Approx(-V + 2.0 * W).epsilon(1e-14));
}

TEST_CASE("XXZ structure: hopping-free is diagonal, rows are sparse, small chains rejected") {
  auto basis = enumerate_basis(8);
  const auto diag = build_xxz(basis, {0.0, 1.0, 1.0});
  CHECK(max_abs(diag.dense - CMatrix(diag.dense.diagonal().asDiagonal())) == 0.0);

  const auto h = build_xxz(basis, {1.0, 1.0, 1.0});
  CHECK(h.hermiticity_defect() < 1e-12);
  for (int r = 0; r < h.sparse->outerSize(); ++r) {
    int off = 0;
    for (SparseCMatrix::InnerIterator it(*h.sparse, r); it; ++it)
      if (it.col() != r) ++off;
    CHECK(off <= 8);
  }
  CHECK(h.meta.model == Model::xxz);
  CHECK(build_xxz(basis, {1.0, 0.0, 1.0}).meta.model == Model::xx);
  CHECK_THROWS_AS(build_xxz(enumerate_basis(2), {}), std::invalid_argument);
}

TEST_CASE("XX chain spectrum is a sum of free-fermion levels") {
  // Jordan-Wigner: hopping J/2, on-site W (-1)^(j+offset) n_j, and the
  // boundary bond picks up (-1)^(N_f - 1) with N_f = L/2 particles.
  for (int L : {4, 6}) {
    for (Stagger st : {Stagger::one_based, Stagger::zero_based}) {
      const double J = 1.0, W = 0.8;
      const int offset = st == Stagger::one_based ? 0 : 1;
      Eigen::MatrixXd single = Eigen::MatrixXd::Zero(L, L);
      for (int j = 1; j <= L; ++j) single(j - 1, j - 1) = W * (((j + offset) % 2 == 0) ? 1.0 : -1.0);
      for (int j = 1; j < L; ++j) single(j - 1, j) = single(j, j - 1) = 0.5 * J;
      const double boundary = ((L / 2 - 1) % 2 == 0) ? 1.0 : -1.0;
      single(L - 1, 0) = single(0, L - 1) = 0.5 * J * boundary;
      const Eigen::VectorXd levels = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(single).eigenvalues();
      std::vector<double> expected;
      for (std::uint32_t m = 0; m < (1U << L); ++m) {
        if (std::popcount(m) != L / 2) continue;
        double e = 0.0;
        for (int k = 0; k < L; ++k)
          if (m & (1U << k)) e += levels[k];
        expected.push_back(e);
      }
      std::sort(expected.begin(), expected.end());
      const auto h = build_xxz(enumerate_basis(L), {J, 0.0, W, st});
      const Eigen::VectorXd got = Eigen::SelfAdjointEigenSolver<CMatrix>(h.dense).eigenvalues();
      REQUIRE(static_cast<std::size_t>(got.size()) == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got[static_cast<Eigen::Index>(i)] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("SYK couplings: canonical count, determinism, symmetries of the full tensor") {
  const int L = 6;
  const auto c = sample_syk_couplings(L, 1.0, 42);
  const int pairs = L * (L - 1) / 2;
  CHECK(c.entries.size() == static_cast<std::size_t>(pairs * (pairs + 1) / 2));
  for (const auto& e : c.entries) {
    CHECK(e.i < e.j);
    CHECK(e.k < e.l);
    CHECK(pair_index(e.i, e.j, L) >= pair_index(e.k, e.l, L));
    if (e.i == e.k && e.j == e.l) CHECK(e.value.imag() == 0.0);
  }
  const auto again = sample_syk_couplings(L, 1.0, 42);
  const auto other = sample_syk_couplings(L, 1.0, 43);
  bool same = true, differs = false;
  for (std::size_t n = 0; n < c.entries.size(); ++n) {
    same = same && c.entries[n].value == again.entries[n].value;
    differs = differs || c.entries[n].value != other.entries[n].value;
  }
  CHECK(same);
  CHECK(differs);

  const auto t = c.full_tensor();
  auto at = [&](int i, int j, int k, int l) { return t[static_cast<std::size_t>(((i * L + j) * L + k) * L + l)]; };
  double worst = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      for (int k = 0; k < L; ++k)
        for (int l = 0; l < L; ++l) {
          worst = std::max(worst, std::abs(at(i, j, k, l) + at(j, i, k, l)));
          worst = std::max(worst, std::abs(at(i, j, k, l) + at(i, j, l, k)));
          worst = std::max(worst, std::abs(at(i, j, k, l) - std::conj(at(k, l, i, j))));
          if (i == j || k == l) worst = std::max(worst, std::abs(at(i, j, k, l)));
        }
  CHECK(worst == 0.0);
}

TEST_CASE("SYK coupling variance matches J^2") {
  // Mean of |J|^2 over >= 1e4 independent canonical entries; for a complex
  // Gaussian |J|^2 is exponential, so the relative standard error is
  // 1/sqrt(n), below 1% here.
  const double J = 1.7;
  double sum_off = 0.0, sum_diag = 0.0;
  int n_off = 0, n_diag = 0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    for (const auto& e : sample_syk_couplings(16, J, seed).entries) {
      if (e.i == e.k && e.j == e.l) {
        sum_diag += std::norm(e.value);
        ++n_diag;
      } else {
        sum_off += std::norm(e.value);
        ++n_off;
      }
    }
  }
  CHECK(n_off >= 10000);
  CHECK(sum_off / n_off == doctest::Approx(J * J).epsilon(0.05));
  CHECK(sum_diag / n_diag == doctest::Approx(J * J).epsilon(0.25));
}

TEST_CASE("SYK sector matrix equals the brute-force string-operator product") {
  for (int L : {4, 6}) {
    auto basis = enumerate_basis(L);
    const auto c = sample_syk_couplings(L, 1.0, 7 + static_cast<std::uint64_t>(L));
    const auto h = build_syk(basis, c);
    const auto full = oracle::syk_full(c);
    const auto P = oracle::sector_isometry(*basis);
    CHECK(max_abs(h.dense - P.adjoint() * full * P) < 1e-12);
    CHECK(h.hermiticity_defect() < 1e-12);
    const auto Q = CMatrix::Identity(full.rows(), full.cols()) - P * P.adjoint();
    CHECK(max_abs(Q * full * P) < 1e-12);
    CHECK(h.meta.model == Model::syk);
  }
}

TEST_CASE("SYK argument checks") {
  CHECK_THROWS_AS(sample_syk_couplings(3, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_syk_couplings(2, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_syk_couplings(6, 0.0, 1), std::invalid_argument);
  const auto c = sample_syk_couplings(6, 1.0, 1);
  CHECK_THROWS_AS(build_syk(enumerate_basis(4), c), std::invalid_argument);
  CHECK(parse_model("syk") == Model::syk);
  CHECK_THROWS_AS(parse_model("ising"), std::invalid_argument);
  CHECK(parse_stagger("one_based") == Stagger::one_based);
  CHECK_THROWS_AS(parse_stagger("two_based"), std::invalid_argument);
}

TEST_CASE("coupling files round-trip exactly") {
  const auto c = sample_syk_couplings(8, 1.3, 99);
  const auto jpath = temp_path("couplings.json");
  const auto bpath = temp_path("couplings.bin");
  write_couplings_json(c, jpath);
  write_couplings_binary(c, bpath);
  for (const auto& back : {read_couplings_json(jpath), read_couplings_binary(bpath)}) {
    CHECK(back.sites == c.sites);
    CHECK(back.J == c.J);
    CHECK(back.seed == c.seed);
    REQUIRE(back.entries.size() == c.entries.size());
    bool equal = true;
    for (std::size_t n = 0; n < c.entries.size(); ++n) {
      const auto& a = c.entries[n];
      const auto& b = back.entries[n];
      equal = equal && a.i == b.i && a.j == b.j && a.k == b.k && a.l == b.l && a.value == b.value;
    }
    CHECK(equal);
  }
  {
    std::ofstream bad(bpath, std::ios::binary | std::ios::trunc);
    bad << "NOPE";
  }
  CHECK_THROWS(read_couplings_binary(bpath));
  CHECK_THROWS(read_couplings_json(temp_path("does_not_exist.json")));
  std::filesystem::remove(jpath);
  std::filesystem::remove(bpath);
}
