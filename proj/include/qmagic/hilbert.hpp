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

#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qmagic/common.hpp"

namespace qmagic {

inline constexpr int kMaxSites = 16;

/// Computational-basis configuration of L spins. Site j (1-based) lives in
/// bit j-1; a set bit is spin up (s_j = +1).
struct SpinConfig {
  std::uint32_t bits = 0;

  constexpr bool up(int site) const noexcept { return (bits >> (site - 1)) & 1U; }
  constexpr int spin(int site) const noexcept { return up(site) ? 1 : -1; }
  constexpr int popcount() const noexcept { return std::popcount(bits); }

  friend constexpr auto operator<=>(SpinConfig, SpinConfig) = default;
};

std::uint64_t binomial(int n, int k);

/// The S^z = 0 sector of L spins: all configurations with L/2 up spins, in
/// ascending integer order. Immutable once built.
class SubspaceBasis {
 public:
  /// Throws std::invalid_argument unless L is even and 2 <= L <= 16.
  explicit SubspaceBasis(int sites);

  int sites() const noexcept { return sites_; }
  std::size_t dim() const noexcept { return configs_.size(); }
  std::span<const SpinConfig> configs() const noexcept { return configs_; }
  SpinConfig operator[](std::size_t i) const noexcept { return configs_[i]; }

  /// Position of `c` in the ascending order (combinatorial number system).
  /// Throws std::invalid_argument if `c` is not in the sector.
  std::size_t rank(SpinConfig c) const;
  /// Throws std::invalid_argument if `index >= dim()`.
  SpinConfig unrank(std::size_t index) const;

  bool contains(SpinConfig c) const noexcept;
  std::uint32_t site_mask() const noexcept { return (sites_ == 32) ? ~0U : ((1U << sites_) - 1U); }

 private:
  std::size_t rank_unchecked(SpinConfig c) const noexcept;

  int sites_;
  std::vector<SpinConfig> configs_;
  std::array<std::array<std::uint32_t, kMaxSites + 1>, kMaxSites + 1> choose_{};
};

using BasisPtr = std::shared_ptr<const SubspaceBasis>;

BasisPtr enumerate_basis(int sites);

/// Complex amplitudes over a SubspaceBasis.
class StateVector {
 public:
  StateVector(BasisPtr basis, CVector amps);

  const SubspaceBasis& basis() const noexcept { return *basis_; }
  const BasisPtr& basis_ptr() const noexcept { return basis_; }
  int sites() const noexcept { return basis_->sites(); }
  std::size_t dim() const noexcept { return basis_->dim(); }

  const CVector& amps() const noexcept { return amps_; }
  CVector& amps() noexcept { return amps_; }
  Complex operator[](std::size_t i) const noexcept { return amps_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amps_.norm(); }
  /// Rescales to unit norm; returns the norm before rescaling.
  double normalize();

  /// Amplitudes scattered into the full 2^L computational basis.
  CVector embed() const;

 private:
  BasisPtr basis_;
  CVector amps_;
};

/// |up, down, up, down, ...>: spin up on odd (1-based) sites.
StateVector neel_state(const BasisPtr& basis);

SpinConfig neel_config(int sites);

}  // namespace qmagic
