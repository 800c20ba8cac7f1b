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

#include <cstdint>
#include <span>
#include <vector>

#include "qmagic/common.hpp"
#include "qmagic/hilbert.hpp"

namespace qmagic {

/// Tensor product of single-site operators, code 0..3 = I, X, Y, Z per
/// site. Stored as two masks: flip (X or Y) and y_or_z (Y or Z).
struct PauliString {
  int sites = 0;
  std::uint32_t flip_mask = 0;
  std::uint32_t y_or_z_mask = 0;

  /// `codes[j-1]` is the code on site j. Throws on codes outside 0..3.
  static PauliString from_codes(std::span<const int> codes);
  static PauliString identity(int sites) { return {sites, 0, 0}; }
  /// Code on 1-based `site`.
  int code(int site) const noexcept;
};

struct PauliElement {
  SpinConfig partner;
  Complex phase;
};

/// The unique nonzero <config|P|partner>.
PauliElement pauli_matrix_element(SpinConfig config, const PauliString& p) noexcept;

/// <psi|P|psi>. Throws NumericalIntegrityError if the imaginary residue
/// exceeds 1e-8.
double pauli_expectation(const StateVector& psi, const PauliString& p);

enum class SreMethod {
  /// Per-string partner sums over the sector (direct route).
  partner,
  /// For each flip mask, all y_or_z masks at once through a Walsh-Hadamard
  /// transform of the partner products conj(C_s) C_{s^flip}.
  walsh,
};

struct SreOptions {
  SreMethod method = SreMethod::walsh;
  /// Threads over flip-mask blocks. The reduction is blockwise in a fixed
  /// order, so the result does not depend on this value.
  int workers = 1;
};

/// Normalized Pauli moments (1/2^L) sum_P <P>^2 and (1/2^L) sum_P <P>^4.
struct PauliMoments {
  double second = 0.0;
  double fourth = 0.0;
};

PauliMoments pauli_moments(const StateVector& psi, const SreOptions& opts = {});

/// Stabilizer Renyi entropy M2 = -ln[(1/2^L) sum_P <P>^4]. Requires L <= 14.
double sre(const StateVector& psi, const SreOptions& opts = {});

/// Same quantity by brute force in the full 2^L space, applying every
/// Pauli string site by site. L <= 8; used as an independent check.
double sre_dense_oracle(const StateVector& psi);
PauliMoments pauli_moments_dense(const StateVector& psi);

/// Neumaier-compensated accumulator.
template <class Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) noexcept {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const noexcept { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

/// In-place unnormalized Walsh-Hadamard transform,
/// out[z] = sum_s (-1)^{popcount(s & z)} in[s]. Size must be a power of two.
template <class Scalar>
void walsh_hadamard_inplace(std::span<Scalar> data) noexcept {
  const std::size_t n = data.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const Scalar a = data[j];
        const Scalar b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
}

}  // namespace qmagic
