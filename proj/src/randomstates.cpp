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

#include "qmagic/randomstates.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qmagic/parallel.hpp"

namespace qmagic {

std::string_view to_string(RandomStateKind k) noexcept { return k == RandomStateKind::phase ? "phase" : "haar"; }

RandomStateKind parse_random_state_kind(std::string_view name) {
  if (name == "phase") return RandomStateKind::phase;
  if (name == "haar") return RandomStateKind::haar;
  throw std::invalid_argument("unknown random state kind '" + std::string(name) + "' (expected phase or haar)");
}

StateVector random_phase_state(const BasisPtr& basis, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(basis->dim());
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double modulus = 1.0 / std::sqrt(static_cast<double>(n));
  CVector amps(n);
  for (Eigen::Index i = 0; i < n; ++i) amps[i] = std::polar(modulus, -angle(rng));
  return StateVector(basis, std::move(amps));
}

StateVector haar_state(const BasisPtr& basis, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(basis->dim());
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector amps(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    amps[i] = Complex(re, im);
  }
  StateVector psi(basis, std::move(amps));
  psi.normalize();
  return psi;
}

StateVector random_state(RandomStateKind kind, const BasisPtr& basis, Rng& rng) {
  return kind == RandomStateKind::phase ? random_phase_state(basis, rng) : haar_state(basis, rng);
}

RandomSreStats random_state_sre(RandomStateKind kind, int sites, int samples, std::uint64_t seed, int workers,
                                const SreOptions& sre_opts) {
  if (samples < 1) throw std::invalid_argument("random_state_sre: need at least one sample");
  const auto basis = enumerate_basis(sites);
  std::vector<double> values(static_cast<std::size_t>(samples));
  SreOptions inner = sre_opts;
  inner.workers = 1;
  parallel_for(values.size(), workers, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    values[r] = sre(random_state(kind, basis, rng), inner);
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= samples;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= samples;
  return {sites, kind, samples, mean, std::sqrt(var) / std::sqrt(static_cast<double>(samples))};
}

}  // namespace qmagic
