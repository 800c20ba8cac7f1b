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

#include "qmagic/hilbert.hpp"

#include <string>

namespace qmagic {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

SubspaceBasis::SubspaceBasis(int sites) : sites_(sites) {
  if (sites < 2 || sites > kMaxSites || sites % 2 != 0)
    throw std::invalid_argument("SubspaceBasis: L must be even and in [2, 16], got " +
                                std::to_string(sites));
  for (int n = 0; n <= kMaxSites; ++n)
    for (int k = 0; k <= kMaxSites; ++k) choose_[n][k] = static_cast<std::uint32_t>(binomial(n, k));

  const int half = sites / 2;
  configs_.reserve(binomial(sites, half));
  // Gosper's hack walks fixed-popcount words in ascending order.
  std::uint32_t v = (1U << half) - 1U;
  const std::uint32_t limit = 1U << sites;
  while (v < limit) {
    configs_.push_back(SpinConfig{v});
    const std::uint32_t t = v | (v - 1U);
    v = (t + 1U) | (((~t & -~t) - 1U) >> (std::countr_zero(v) + 1));
  }
}

bool SubspaceBasis::contains(SpinConfig c) const noexcept {
  return (c.bits & ~site_mask()) == 0 && c.popcount() == sites_ / 2;
}

std::size_t SubspaceBasis::rank_unchecked(SpinConfig c) const noexcept {
  // For fixed popcount, ascending integer order is colex order of the set
  // bit positions p_1 < p_2 < ...: rank = sum_i C(p_i, i).
  std::size_t r = 0;
  std::uint32_t bits = c.bits;
  int i = 1;
  while (bits) {
    const int p = std::countr_zero(bits);
    r += choose_[p][i];
    bits &= bits - 1U;
    ++i;
  }
  return r;
}

std::size_t SubspaceBasis::rank(SpinConfig c) const {
  if (!contains(c))
    throw std::invalid_argument("rank: configuration " + std::to_string(c.bits) +
                                " is not in the zero-magnetization sector of L=" + std::to_string(sites_));
  return rank_unchecked(c);
}

SpinConfig SubspaceBasis::unrank(std::size_t index) const {
  if (index >= dim())
    throw std::invalid_argument("unrank: index " + std::to_string(index) + " out of range [0, " +
                                std::to_string(dim()) + ")");
  std::uint32_t bits = 0;
  std::size_t r = index;
  for (int i = sites_ / 2; i >= 1; --i) {
    int p = i - 1;
    while (p + 1 < sites_ && choose_[p + 1][i] <= r) ++p;
    bits |= 1U << p;
    r -= choose_[p][i];
  }
  return SpinConfig{bits};
}

BasisPtr enumerate_basis(int sites) { return std::make_shared<const SubspaceBasis>(sites); }

StateVector::StateVector(BasisPtr basis, CVector amps) : basis_(std::move(basis)), amps_(std::move(amps)) {
  if (!basis_) throw std::invalid_argument("StateVector: null basis");
  if (static_cast<std::size_t>(amps_.size()) != basis_->dim())
    throw std::invalid_argument("StateVector: amplitude count " + std::to_string(amps_.size()) +
                                " does not match basis dimension " + std::to_string(basis_->dim()));
}

double StateVector::normalize() {
  const double n = amps_.norm();
  if (!(n > 0.0)) throw NumericalIntegrityError("StateVector::normalize: zero norm");
  amps_ /= n;
  return n;
}

CVector StateVector::embed() const {
  CVector full = CVector::Zero(Eigen::Index{1} << sites());
  const auto configs = basis_->configs();
  for (std::size_t i = 0; i < configs.size(); ++i) full[configs[i].bits] = amps_[static_cast<Eigen::Index>(i)];
  return full;
}

SpinConfig neel_config(int sites) {
  std::uint32_t bits = 0;
  for (int j = 1; j <= sites; j += 2) bits |= 1U << (j - 1);
  return SpinConfig{bits};
}

StateVector neel_state(const BasisPtr& basis) {
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->dim()));
  amps[static_cast<Eigen::Index>(basis->rank(neel_config(basis->sites())))] = 1.0;
  return StateVector(basis, std::move(amps));
}

}  // namespace qmagic
