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
#include <string_view>

#include "qmagic/common.hpp"
#include "qmagic/hilbert.hpp"
#include "qmagic/magic.hpp"

namespace qmagic {

enum class RandomStateKind { phase, haar };

std::string_view to_string(RandomStateKind k) noexcept;
RandomStateKind parse_random_state_kind(std::string_view name);

/// Equal moduli 1/sqrt(N_L), phases uniform in [0, 2pi).
StateVector random_phase_state(const BasisPtr& basis, Rng& rng);

/// Normalized vector of i.i.d. standard complex Gaussians: a Haar-random
/// unit vector of the sector.
StateVector haar_state(const BasisPtr& basis, Rng& rng);

StateVector random_state(RandomStateKind kind, const BasisPtr& basis, Rng& rng);

struct RandomSreStats {
  int sites = 0;
  RandomStateKind kind = RandomStateKind::phase;
  int samples = 0;
  double mean = 0.0;
  /// RMS deviation over realizations divided by sqrt(samples).
  double std_error = 0.0;
};

/// Mean SRE over `samples` realizations; realization r uses
/// derive_seed(seed, r), so the result is independent of `workers`.
RandomSreStats random_state_sre(RandomStateKind kind, int sites, int samples, std::uint64_t seed, int workers = 1,
                                const SreOptions& sre_opts = {});

}  // namespace qmagic
