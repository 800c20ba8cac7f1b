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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qmagic/common.hpp"
#include "qmagic/monitoring.hpp"

namespace qmagic {

struct MeanError {
  double mean = 0.0;
  /// RMS deviation from the mean divided by sqrt(count).
  double std_error = 0.0;
};

/// Throws std::invalid_argument on an empty input.
MeanError mean_and_error(std::span<const double> values);

/// Steady-state SRE of one (gamma, L) point.
struct SweepPoint {
  double gamma = 0.0;
  int sites = 0;
  double mean = 0.0;
  /// RMS deviation of per-trajectory window means over sqrt(n_traj).
  double std_error = 0.0;
  int n_traj = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  /// First- and second-half window means agree within 2 combined stderr.
  bool stationary = true;
  std::string warning;
};

/// Time average over [t0, t1] per record, then mean and error over records.
/// Throws std::invalid_argument if any record has no sample in the window.
SweepPoint steady_average(std::span<const TrajectoryRecord> records, double t0, double t1);

struct TimeAverage {
  double mean = 0.0;
  /// Spread of `blocks` consecutive block means over sqrt(blocks).
  double std_error = 0.0;
  int samples = 0;
};

/// Window average of a single series with a block-mean error estimate.
TimeAverage time_average(std::span<const double> times, std::span<const double> values, double t0, double t1,
                         int blocks = 10);

/// A / (1 + (gamma / gamma0)^b)
template <class Scalar>
Scalar generalized_lorentzian(Scalar gamma, Scalar amplitude, Scalar gamma0, Scalar exponent) {
  using std::pow;
  return amplitude / (Scalar(1) + pow(gamma / gamma0, exponent));
}

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;
};

struct FitResult {
  double A = 0.0;
  double gamma0 = 0.0;
  double b = 0.0;
  /// Covariance of (A, gamma0, b).
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  /// sqrt(chi^2 / n) at the returned parameters.
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
  /// chi^2 after every accepted step, starting from the initial guess.
  std::vector<double> chi2_history;

  double A_err() const { return std::sqrt(covariance(0, 0)); }
  double gamma0_err() const { return std::sqrt(covariance(1, 1)); }
  double b_err() const { return std::sqrt(covariance(2, 2)); }
};

struct LorentzianFitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
};

/// Weighted least squares fit of A / (1 + (x / gamma0)^b) in the log
/// parameters (ln A, ln gamma0, ln b) by Levenberg-Marquardt. Needs >= 4
/// points with x > 0 spanning a decade and sigma > 0. Never throws on
/// non-convergence: the best iterate comes back with converged = false.
FitResult fit_generalized_lorentzian(std::span<const FitPoint> points, const LorentzianFitOptions& opts = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double intercept_err = 0.0;
};

/// Straight line through (x, y). Uses 1/sigma^2 weights with the known-sigma
/// error when every sigma is positive; otherwise ordinary least squares
/// with the residual-based error. Needs >= 3 points and two distinct x.
LinearFit fit_linear(std::span<const FitPoint> points);

}  // namespace qmagic
