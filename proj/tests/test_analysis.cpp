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

#include <cmath>
#include <random>

#include "qmagic/analysis.hpp"

using namespace qmagic;

namespace {

TrajectoryRecord record(std::vector<double> t, std::vector<double> s, std::uint64_t seed = 0) {
  TrajectoryRecord r;
  r.times = std::move(t);
  r.sre = std::move(s);
  r.seed = seed;
  return r;
}

std::vector<FitPoint> lorentzian_data(double A, double g0, double b, int n, double rel_sigma) {
  std::vector<FitPoint> pts;
  for (int i = 0; i < n; ++i) {
    const double x = 0.01 * std::pow(1000.0, i / double(n - 1));
    const double y = generalized_lorentzian(x, A, g0, b);
    pts.push_back({x, y, rel_sigma * y});
  }
  return pts;
}

// Covariance (J^T J)^{-1} in (A, gamma0, b) from a central-difference
// Jacobian of the weighted residuals.
Eigen::Matrix3d numeric_covariance(const std::vector<FitPoint>& pts, const FitResult& f) {
  const Eigen::Vector3d p(f.A, f.gamma0, f.b);
  Eigen::MatrixXd J(static_cast<Eigen::Index>(pts.size()), 3);
  for (int c = 0; c < 3; ++c) {
    const double h = 1e-6 * p[c];
    Eigen::Vector3d hi = p, lo = p;
    hi[c] += h;
    lo[c] -= h;
    for (std::size_t i = 0; i < pts.size(); ++i)
      J(static_cast<Eigen::Index>(i), c) = (generalized_lorentzian(pts[i].x, hi[0], hi[1], hi[2]) -
                                            generalized_lorentzian(pts[i].x, lo[0], lo[1], lo[2])) /
                                           (2.0 * h * pts[i].sigma);
  }
  return (J.transpose() * J).inverse();
}

}  // namespace

TEST_CASE("mean and error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_and_error(v);
  CHECK(m.mean == doctest::Approx(2.5));
  // Population deviation sqrt(1.25) over sqrt(4).
  CHECK(m.std_error == doctest::Approx(std::sqrt(1.25) / 2.0));
  CHECK(mean_and_error(std::vector<double>{7.0}).std_error == 0.0);
  CHECK_THROWS_AS(mean_and_error(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("steady average over a window") {
  const std::vector<TrajectoryRecord> recs{record({0, 1, 2, 3, 4}, {9, 1, 1, 1, 1}, 1),
                                           record({0, 1, 2, 3, 4}, {9, 3, 3, 3, 3}, 2)};
  const auto p = steady_average(recs, 1.0, 4.0);
  CHECK(p.mean == doctest::Approx(2.0));
  CHECK(p.std_error == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p.n_traj == 2);
  CHECK(p.stationary);
  CHECK(p.warning.empty());

  // A drifting signal fails the half-window comparison.
  std::vector<TrajectoryRecord> drift;
  for (int r = 0; r < 8; ++r) {
    std::vector<double> t, s;
    for (int k = 0; k <= 100; ++k) {
      t.push_back(k);
      s.push_back(0.01 * k + 0.001 * r);
    }
    drift.push_back(record(t, s, static_cast<std::uint64_t>(r)));
  }
  const auto d = steady_average(drift, 0.0, 100.0);
  CHECK_FALSE(d.stationary);
  CHECK(d.warning.find("halves") != std::string::npos);

  CHECK_THROWS_WITH_AS(steady_average(recs, 10.0, 20.0), doctest::Contains("seed 1"), std::invalid_argument);
  CHECK_THROWS_AS(steady_average(recs, 2.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(steady_average(std::vector<TrajectoryRecord>{}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("time average with block errors") {
  std::vector<double> t, v;
  for (int k = 0; k < 100; ++k) {
    t.push_back(k);
    v.push_back(k < 50 ? 1.0 : 3.0);
  }
  const auto a = time_average(t, v, 0.0, 99.0, 2);
  CHECK(a.mean == doctest::Approx(2.0));
  CHECK(a.samples == 100);
  CHECK(a.std_error == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(time_average(t, v, 60.0, 99.0).std_error == 0.0);
  CHECK_THROWS_AS(time_average(t, v, 200.0, 300.0), std::invalid_argument);
  CHECK_THROWS_AS(time_average(t, std::vector<double>{1.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Lorentzian fit recovers noiseless parameters") {
  for (double b : {1.0, 2.0, 2.7}) {
    const auto pts = lorentzian_data(3.2, 0.15, b, 12, 0.01);
    const auto f = fit_generalized_lorentzian(pts);
    CHECK(f.converged);
    CHECK(std::abs(f.A - 3.2) < 1e-8);
    CHECK(std::abs(f.gamma0 - 0.15) < 1e-8);
    CHECK(std::abs(f.b - b) < 1e-8);
    CHECK(f.residual_rms < 1e-8);
    for (std::size_t k = 1; k < f.chi2_history.size(); ++k) CHECK(f.chi2_history[k] <= f.chi2_history[k - 1]);
    const Eigen::Matrix3d ref = numeric_covariance(pts, f);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(f.covariance(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-4));
  }
}

TEST_CASE("Lorentzian fit on noisy data") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n;
  auto pts = lorentzian_data(2.5, 0.3, 2.0, 12, 0.02);
  for (auto& p : pts) p.y += p.sigma * n(rng);
  const auto f = fit_generalized_lorentzian(pts);
  CHECK(f.converged);
  CHECK(std::abs(f.A - 2.5) < 3.0 * f.A_err());
  CHECK(std::abs(f.gamma0 - 0.3) < 3.0 * f.gamma0_err());
  CHECK(std::abs(f.b - 2.0) < 3.0 * f.b_err());
  CHECK(std::abs(f.b - 2.0) < 0.04);
  CHECK(f.residual_rms < 2.0);

  // Scaling all sigmas scales the covariance quadratically.
  auto scaled = pts;
  for (auto& p : scaled) p.sigma *= 3.0;
  const auto g = fit_generalized_lorentzian(scaled);
  CHECK(g.A == doctest::Approx(f.A).epsilon(1e-7));
  CHECK(g.covariance(0, 0) == doctest::Approx(9.0 * f.covariance(0, 0)).epsilon(1e-5));
  CHECK(g.residual_rms == doctest::Approx(f.residual_rms / 3.0).epsilon(1e-6));
}

TEST_CASE("Lorentzian fit reports non-convergence and rejects bad input") {
  const auto pts = lorentzian_data(3.0, 0.2, 2.0, 10, 0.01);
  LorentzianFitOptions opts;
  opts.max_iterations = 1;
  const auto f = fit_generalized_lorentzian(pts, opts);
  CHECK_FALSE(f.converged);
  CHECK(f.iterations == 1);

  CHECK_THROWS_AS(fit_generalized_lorentzian(std::span(pts).first(3)), std::invalid_argument);
  auto bad = pts;
  bad[2].sigma = 0.0;
  CHECK_THROWS_AS(fit_generalized_lorentzian(bad), std::invalid_argument);
  bad = pts;
  bad[0].x = -1.0;
  CHECK_THROWS_AS(fit_generalized_lorentzian(bad), std::invalid_argument);
  const std::vector<FitPoint> narrow{{1, 1, .1}, {2, .8, .1}, {3, .5, .1}, {4, .3, .1}};
  CHECK_THROWS_WITH_AS(fit_generalized_lorentzian(narrow), doctest::Contains("decade"), std::invalid_argument);
}

TEST_CASE("straight-line fit") {
  const std::vector<FitPoint> exact{{6, 1.0 + 6 * 0.7, 0}, {8, 1.0 + 8 * 0.7, 0}, {10, 1.0 + 10 * 0.7, 0}};
  const auto a = fit_linear(exact);
  CHECK(a.slope == doctest::Approx(0.7));
  CHECK(a.intercept == doctest::Approx(1.0));
  CHECK(a.slope_err < 1e-12);

  // Weighted: the known-sigma error of the slope is 1/sqrt(sum w (x - xbar)^2).
  const std::vector<FitPoint> w{{0, 0.1, 0.1}, {1, 0.9, 0.1}, {2, 2.05, 0.1}};
  const auto b = fit_linear(w);
  CHECK(b.slope_err == doctest::Approx(0.1 / std::sqrt(2.0)));
  CHECK(b.slope == doctest::Approx(0.975));

  CHECK_THROWS_AS(fit_linear(std::span(exact).first(2)), std::invalid_argument);
  const std::vector<FitPoint> same{{1, 1, 0}, {1, 2, 0}, {1, 3, 0}};
  CHECK_THROWS_AS(fit_linear(same), std::invalid_argument);
}
