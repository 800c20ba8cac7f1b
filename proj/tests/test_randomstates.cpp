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
#include <cmath>

#include "qmagic/randomstates.hpp"

using namespace qmagic;

TEST_CASE("random-phase states have equal moduli and unit norm") {
  auto b = enumerate_basis(8);
  Rng rng(1);
  for (int r = 0; r < 20; ++r) {
    const auto psi = random_phase_state(b, rng);
    const double target = 1.0 / std::sqrt(static_cast<double>(b->dim()));
    CHECK((psi.amps().cwiseAbs().array() - target).abs().maxCoeff() < 1e-15);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-14);
  }
}

TEST_CASE("Haar amplitudes follow the Beta(1, N-1) marginal") {
  // |C_0|^2 of a Haar vector on C^N has CDF 1 - (1 - x)^(N-1). One
  // amplitude per state keeps the sample independent; the 1% KS critical
  // value is 1.628 / sqrt(n).
  auto b = enumerate_basis(6);
  const double N = static_cast<double>(b->dim());
  Rng rng(2024);
  std::vector<double> x;
  for (int r = 0; r < 4000; ++r) {
    const auto psi = haar_state(b, rng);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    x.push_back(std::norm(psi[0]));
  }
  std::sort(x.begin(), x.end());
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double cdf = 1.0 - std::pow(1.0 - x[i], N - 1.0);
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  CHECK(d < 1.628 / std::sqrt(n));
}

TEST_CASE("baseline statistics are reproducible and worker independent") {
  const auto a = random_state_sre(RandomStateKind::phase, 6, 12, 99, 1);
  const auto b = random_state_sre(RandomStateKind::phase, 6, 12, 99, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.samples == 12);
  const auto c = random_state_sre(RandomStateKind::phase, 6, 12, 100, 1);
  CHECK(c.mean != a.mean);
  CHECK(parse_random_state_kind("haar") == RandomStateKind::haar);
  CHECK_THROWS_AS(parse_random_state_kind("gaussian"), std::invalid_argument);
}

TEST_CASE("random states sit near the top of the SRE range") {
  for (int L : {6, 8}) {
    const auto s = random_state_sre(RandomStateKind::phase, L, 30, 5);
    CHECK(s.mean > 0.5 * std::log(static_cast<double>(binomial(L, L / 2))));
    CHECK(s.mean < L * std::log(2.0));
  }
}

TEST_CASE("phase and Haar means draw together as L grows") {
  const auto p6 = random_state_sre(RandomStateKind::phase, 6, 200, 1);
  const auto h6 = random_state_sre(RandomStateKind::haar, 6, 200, 2);
  const auto p10 = random_state_sre(RandomStateKind::phase, 10, 60, 3);
  const auto h10 = random_state_sre(RandomStateKind::haar, 10, 60, 4);
  const double gap6 = p6.mean - h6.mean;
  const double gap10 = p10.mean - h10.mean;
  CHECK(std::abs(gap10) < std::abs(gap6));
  CHECK(std::abs(gap10) < 0.01 * p10.mean);
}
