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

#include "qmagic/magic.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qmagic/parallel.hpp"

namespace qmagic {

namespace {

constexpr int kMaxSreSites = 14;
constexpr int kMaxDenseOracleSites = 8;
constexpr double kImagResidueLimit = 1e-8;
// Flip masks are split into this many blocks regardless of worker count.
constexpr std::size_t kReductionBlocks = 64;

// i^e for e taken mod 4.
inline Complex i_power(int e) noexcept {
  switch (e & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct MomentSums {
  CompensatedSum<double> second;
  CompensatedSum<double> fourth;

  void add(double a) noexcept {
    const double a2 = a * a;
    second.add(a2);
    fourth.add(a2 * a2);
  }
};

void check_residue(double imag, std::uint32_t flip, std::uint32_t yz) {
  if (std::abs(imag) > kImagResidueLimit)
    throw NumericalIntegrityError("Pauli expectation (flip=" + std::to_string(flip) + ", yz=" + std::to_string(yz) +
                                  ") has imaginary residue " + std::to_string(imag));
}

// Sector configurations whose image under `flip` stays in the sector, as
// (index, partner index) pairs.
std::vector<std::pair<std::uint32_t, std::uint32_t>> balanced_pairs(const SubspaceBasis& basis,
                                                                    std::uint32_t flip) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  const int half = std::popcount(flip) / 2;
  const auto configs = basis.configs();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (std::popcount(configs[i].bits & flip) != half) continue;
    out.emplace_back(static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(basis.rank(SpinConfig{configs[i].bits ^ flip})));
  }
  return out;
}

std::vector<std::uint32_t> even_flip_masks(int sites) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t f = 0; f < (1U << sites); ++f)
    if (std::popcount(f) % 2 == 0) masks.push_back(f);
  return masks;
}

void accumulate_partner(const StateVector& psi, std::uint32_t flip, MomentSums& sums) {
  const auto& basis = psi.basis();
  const int L = psi.sites();
  const auto pairs = balanced_pairs(basis, flip);
  std::vector<Complex> products(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k)
    products[k] = std::conj(psi[pairs[k].first]) * psi[pairs[k].second];
  for (std::uint32_t yz = 0; yz < (1U << L); ++yz) {
    const PauliString p{L, flip, yz};
    CompensatedSum<Complex> acc;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto el = pauli_matrix_element(basis[pairs[k].first], p);
      acc.add(el.phase * products[k]);
    }
    const Complex a = acc.value();
    check_residue(a.imag(), flip, yz);
    sums.add(a.real());
  }
}

void accumulate_walsh(const StateVector& psi, std::uint32_t flip, std::vector<Complex>& work, MomentSums& sums) {
  const auto& basis = psi.basis();
  const int L = psi.sites();
  const int half = std::popcount(flip) / 2;
  std::fill(work.begin(), work.end(), Complex(0.0, 0.0));
  const auto configs = basis.configs();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::uint32_t s = configs[i].bits;
    if (std::popcount(s & flip) != half) continue;
    work[s] = std::conj(psi[i]) * psi[basis.rank(SpinConfig{s ^ flip})];
  }
  walsh_hadamard_inplace(std::span<Complex>(work));
  // <P> = kappa(flip, yz) * work[yz], where each Y site contributes i and
  // each Z site -1; the remaining config-dependent sign is the transform.
  const std::uint32_t full = (1U << L) - 1U;
  for (std::uint32_t yz = 0; yz <= full; ++yz) {
    const int n_y = std::popcount(yz & flip);
    const int n_z = std::popcount(yz & ~flip & full);
    const Complex a = i_power(n_y + 2 * n_z) * work[yz];
    check_residue(a.imag(), flip, yz);
    sums.add(a.real());
  }
}

}  // namespace

PauliString PauliString::from_codes(std::span<const int> codes) {
  if (codes.size() > static_cast<std::size_t>(kMaxSites)) throw std::invalid_argument("PauliString: too many sites");
  PauliString p;
  p.sites = static_cast<int>(codes.size());
  for (std::size_t j = 0; j < codes.size(); ++j) {
    const int c = codes[j];
    if (c < 0 || c > 3) throw std::invalid_argument("PauliString: code must be in 0..3, got " + std::to_string(c));
    if (c == 1 || c == 2) p.flip_mask |= 1U << j;
    if (c == 2 || c == 3) p.y_or_z_mask |= 1U << j;
  }
  return p;
}

int PauliString::code(int site) const noexcept {
  const bool f = (flip_mask >> (site - 1)) & 1U;
  const bool z = (y_or_z_mask >> (site - 1)) & 1U;
  if (f) return z ? 2 : 1;
  return z ? 3 : 0;
}

PauliElement pauli_matrix_element(SpinConfig config, const PauliString& p) noexcept {
  const std::uint32_t y_sites = p.flip_mask & p.y_or_z_mask;
  const std::uint32_t z_sites = p.y_or_z_mask & ~p.flip_mask;
  // Y: <up|Y|down> = -i, <down|Y|up> = +i.  Z: +1 on up, -1 on down.
  const int y_up = std::popcount(y_sites & config.bits);
  const int y_down = std::popcount(y_sites & ~config.bits);
  const int z_down = std::popcount(z_sites & ~config.bits);
  const Complex phase = i_power(y_down - y_up + 2 * z_down);
  return {SpinConfig{config.bits ^ p.flip_mask}, phase};
}

double pauli_expectation(const StateVector& psi, const PauliString& p) {
  const auto& basis = psi.basis();
  if (p.sites != basis.sites()) throw std::invalid_argument("pauli_expectation: Pauli string width mismatch");
  CompensatedSum<Complex> acc;
  if (std::popcount(p.flip_mask) % 2 == 0) {
    const auto configs = basis.configs();
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto el = pauli_matrix_element(configs[i], p);
      if (!basis.contains(el.partner)) continue;
      acc.add(el.phase * std::conj(psi[i]) * psi[basis.rank(el.partner)]);
    }
  }
  const Complex a = acc.value();
  check_residue(a.imag(), p.flip_mask, p.y_or_z_mask);
  return a.real();
}

PauliMoments pauli_moments(const StateVector& psi, const SreOptions& opts) {
  const int L = psi.sites();
  if (L > kMaxSreSites) throw CapacityError("SRE evaluation supports L <= 14, got L=" + std::to_string(L));
  const auto masks = even_flip_masks(L);
  const std::size_t nblocks = std::min(kReductionBlocks, masks.size());
  std::vector<MomentSums> block_sums(nblocks);

  parallel_for(nblocks, opts.workers, [&](std::size_t b) {
    const std::size_t lo = masks.size() * b / nblocks;
    const std::size_t hi = masks.size() * (b + 1) / nblocks;
    std::vector<Complex> work;
    if (opts.method == SreMethod::walsh) work.resize(std::size_t{1} << L);
    for (std::size_t m = lo; m < hi; ++m) {
      if (opts.method == SreMethod::walsh) accumulate_walsh(psi, masks[m], work, block_sums[b]);
      else accumulate_partner(psi, masks[m], block_sums[b]);
    }
  });

  CompensatedSum<double> second, fourth;
  for (const auto& s : block_sums) {
    second.add(s.second.value());
    fourth.add(s.fourth.value());
  }
  const double scale = std::ldexp(1.0, -L);
  return {second.value() * scale, fourth.value() * scale};
}

namespace {

double sre_from_fourth(double fourth) {
  const double m2 = -std::log(fourth);
  if (m2 < -1e-12) throw NumericalIntegrityError("SRE evaluated to " + std::to_string(m2) + " < 0");
  return std::max(0.0, m2);
}

}  // namespace

double sre(const StateVector& psi, const SreOptions& opts) { return sre_from_fourth(pauli_moments(psi, opts).fourth); }

PauliMoments pauli_moments_dense(const StateVector& psi) {
  const int L = psi.sites();
  if (L > kMaxDenseOracleSites)
    throw CapacityError("sre_dense_oracle supports L <= 8, got L=" + std::to_string(L));
  const CVector v = psi.embed();
  const std::size_t dim = std::size_t{1} << L;
  const std::size_t nstrings = std::size_t{1} << (2 * L);
  CVector w(static_cast<Eigen::Index>(dim));
  CompensatedSum<double> second, fourth;
  for (std::size_t s = 0; s < nstrings; ++s) {
    w = v;
    // Code of site j is base-4 digit j of s. Row/column order per site is
    // (up, down) = (bit 1, bit 0).
    for (int j = 0; j < L; ++j) {
      const int code = static_cast<int>((s >> (2 * j)) & 3U);
      if (code == 0) continue;
      const std::size_t bit = std::size_t{1} << j;
      for (std::size_t x = 0; x < dim; ++x) {
        if (x & bit) continue;
        const Complex down = w[static_cast<Eigen::Index>(x)];
        const Complex up = w[static_cast<Eigen::Index>(x | bit)];
        Complex new_up, new_down;
        switch (code) {
          case 1: new_up = down; new_down = up; break;
          case 2: new_up = -kI * down; new_down = kI * up; break;
          default: new_up = up; new_down = -down; break;
        }
        w[static_cast<Eigen::Index>(x)] = new_down;
        w[static_cast<Eigen::Index>(x | bit)] = new_up;
      }
    }
    const double a = v.dot(w).real();
    second.add(a * a);
    fourth.add(a * a * a * a);
  }
  const double scale = std::ldexp(1.0, -L);
  return {second.value() * scale, fourth.value() * scale};
}

double sre_dense_oracle(const StateVector& psi) { return sre_from_fourth(pauli_moments_dense(psi).fourth); }

}  // namespace qmagic
