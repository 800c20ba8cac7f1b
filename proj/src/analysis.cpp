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

#include "qmagic/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace qmagic {

namespace {

std::optional<double> try_window_mean(const TrajectoryRecord& r, double t0, double t1) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < r.times.size() && k < r.sre.size(); ++k) {
    if (r.times[k] >= t0 && r.times[k] <= t1) {
      sum += r.sre[k];
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

double window_mean(const TrajectoryRecord& r, double t0, double t1) {
  const auto m = try_window_mean(r, t0, t1);
  if (!m) {
    std::ostringstream msg;
    msg << "steady_average: no samples in window [" << t0 << ", " << t1 << "] for trajectory seed " << r.seed;
    throw std::invalid_argument(msg.str());
  }
  return *m;
}

}  // namespace

MeanError mean_and_error(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean_and_error: no values");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n) / std::sqrt(n)};
}

SweepPoint steady_average(std::span<const TrajectoryRecord> records, double t0, double t1) {
  if (records.empty()) throw std::invalid_argument("steady_average: no records");
  if (!(t1 > t0)) throw std::invalid_argument("steady_average: need t1 > t0");

  std::vector<double> full, first, second;
  const double mid = 0.5 * (t0 + t1);
  bool halves = true;
  for (const auto& r : records) {
    full.push_back(window_mean(r, t0, t1));
    const auto h1 = try_window_mean(r, t0, mid);
    const auto h2 = try_window_mean(r, std::nextafter(mid, t1), t1);
    halves = halves && h1 && h2;
    if (halves) {
      first.push_back(*h1);
      second.push_back(*h2);
    }
  }
  const auto all = mean_and_error(full);

  SweepPoint p;
  p.mean = all.mean;
  p.std_error = all.std_error;
  p.n_traj = static_cast<int>(records.size());
  p.t0 = t0;
  p.t1 = t1;
  if (!halves) return p;
  const auto a = mean_and_error(first);
  const auto b = mean_and_error(second);
  const double combined = std::hypot(a.std_error, b.std_error);
  if (std::abs(a.mean - b.mean) > 2.0 * combined) {
    p.stationary = false;
    std::ostringstream msg;
    msg << "window halves differ: " << a.mean << " vs " << b.mean << " (combined stderr " << combined << ")";
    p.warning = msg.str();
  }
  return p;
}

TimeAverage time_average(std::span<const double> times, std::span<const double> values, double t0, double t1,
                         int blocks) {
  if (times.size() != values.size()) throw std::invalid_argument("time_average: size mismatch");
  if (blocks < 1) throw std::invalid_argument("time_average: blocks must be >= 1");
  std::vector<double> w;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= t0 && times[k] <= t1) w.push_back(values[k]);
  if (w.empty()) throw std::invalid_argument("time_average: empty window");
  TimeAverage out;
  out.samples = static_cast<int>(w.size());
  out.mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  const auto nb = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(blocks), w.size()));
  if (nb < 2) return out;
  std::vector<double> means;
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t lo = w.size() * b / nb;
    const std::size_t hi = w.size() * (b + 1) / nb;
    means.push_back(std::accumulate(w.begin() + static_cast<std::ptrdiff_t>(lo),
                                    w.begin() + static_cast<std::ptrdiff_t>(hi), 0.0) /
                    static_cast<double>(hi - lo));
  }
  out.std_error = mean_and_error(means).std_error;
  return out;
}

namespace {

struct LorentzianProblem {
  std::span<const FitPoint> points;

  // Weighted residuals and Jacobian in (ln A, ln gamma0, ln b).
  void evaluate(const Eigen::Vector3d& theta, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const double A = std::exp(theta[0]);
    const double b = std::exp(theta[2]);
    const auto n = static_cast<Eigen::Index>(points.size());
    r.resize(n);
    if (jac) jac->resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = points[static_cast<std::size_t>(i)];
      const double logratio = std::log(p.x) - theta[1];
      const double u = std::exp(b * logratio);
      const double f = A / (1.0 + u);
      r[i] = (f - p.y) / p.sigma;
      if (jac) {
        const double g = A * u / ((1.0 + u) * (1.0 + u));
        (*jac)(i, 0) = f / p.sigma;
        (*jac)(i, 1) = g * b / p.sigma;
        (*jac)(i, 2) = -g * b * logratio / p.sigma;
      }
    }
  }
};

Eigen::Vector3d initial_guess(std::vector<FitPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
  double A = pts.front().y;
  if (!(A > 0.0)) {
    A = 0.0;
    for (const auto& p : pts) A = std::max(A, std::abs(p.y));
    if (!(A > 0.0)) A = 1.0;
  }
  double g0 = pts.back().x;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].y < 0.5 * A) {
      const double y0 = pts[i - 1].y;
      const double y1 = pts[i].y;
      const double lx0 = std::log(pts[i - 1].x);
      const double lx1 = std::log(pts[i].x);
      const double frac = (y0 == y1) ? 0.0 : std::clamp((y0 - 0.5 * A) / (y0 - y1), 0.0, 1.0);
      g0 = std::exp(lx0 + frac * (lx1 - lx0));
      break;
    }
  }
  return {std::log(A), std::log(g0), std::log(2.0)};
}

}  // namespace

FitResult fit_generalized_lorentzian(std::span<const FitPoint> points, const LorentzianFitOptions& opts) {
  if (points.size() < 4) throw std::invalid_argument("fit_generalized_lorentzian: need at least 4 points");
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = 0.0;
  for (const auto& p : points) {
    if (!(p.x > 0.0)) throw std::invalid_argument("fit_generalized_lorentzian: gamma values must be positive");
    if (!(p.sigma > 0.0)) throw std::invalid_argument("fit_generalized_lorentzian: stderr values must be positive");
    if (!std::isfinite(p.y)) throw std::invalid_argument("fit_generalized_lorentzian: non-finite data");
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (xmax < 10.0 * xmin) throw std::invalid_argument("fit_generalized_lorentzian: gamma range spans less than a decade");

  const LorentzianProblem problem{points};
  Eigen::Vector3d theta = initial_guess({points.begin(), points.end()});
  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd J;
  problem.evaluate(theta, r, &J);
  double chi2 = r.squaredNorm();

  FitResult res;
  res.chi2_history.push_back(chi2);
  double lambda = 1e-3;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::Vector3d grad = J.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    const Eigen::Matrix3d jtj = J.transpose() * J;
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d step = damped.ldlt().solve(-grad);
      const Eigen::Vector3d trial = theta + step;
      problem.evaluate(trial, r_try, nullptr);
      const double chi2_try = r_try.squaredNorm();
      if (std::isfinite(chi2_try) && chi2_try < chi2) {
        theta = trial;
        chi2 = chi2_try;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at working precision: accept as converged
      // when the gradient is negligible relative to its natural scale.
      const double scale = J.norm() * r.norm();
      res.converged = grad.norm() <= 1e-8 * std::max(scale, 1.0);
      break;
    }
    problem.evaluate(theta, r, &J);
    res.chi2_history.push_back(chi2);
  }
  if (it == opts.max_iterations) {
    const Eigen::Vector3d grad = J.transpose() * r;
    res.converged = grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance;
  }

  res.iterations = it;
  res.A = std::exp(theta[0]);
  res.gamma0 = std::exp(theta[1]);
  res.b = std::exp(theta[2]);
  res.residual_rms = std::sqrt(chi2 / static_cast<double>(points.size()));
  const Eigen::Matrix3d jtj = J.transpose() * J;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  if (lu.isInvertible()) {
    const Eigen::Matrix3d log_cov = lu.inverse();
    const Eigen::Vector3d d(res.A, res.gamma0, res.b);
    res.covariance = d.asDiagonal() * log_cov * d.asDiagonal();
  } else {
    res.covariance.setConstant(std::numeric_limits<double>::infinity());
    res.converged = false;
  }
  return res;
}

LinearFit fit_linear(std::span<const FitPoint> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_linear: need at least 3 points");
  const bool weighted = std::all_of(points.begin(), points.end(), [](const FitPoint& p) { return p.sigma > 0.0; });
  double s = 0, sx = 0, sy = 0, sxx = 0;
  for (const auto& p : points) {
    const double w = weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
    s += w;
    sx += w * p.x;
    sy += w * p.y;
    sxx += w * p.x * p.x;
  }
  // Centered form avoids cancellation in s*sxx - sx^2.
  const double xbar = sx / s;
  double cxx = 0.0;
  for (const auto& p : points) {
    const double w = weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
    cxx += w * (p.x - xbar) * (p.x - xbar);
  }
  if (!(cxx > 1e-14 * std::max(1.0, sxx))) throw std::invalid_argument("fit_linear: abscissae are degenerate");
  const double ybar = sy / s;
  double cxy = 0.0;
  for (const auto& p : points) {
    const double w = weighted ? 1.0 / (p.sigma * p.sigma) : 1.0;
    cxy += w * (p.x - xbar) * (p.y - ybar);
  }
  LinearFit fit;
  fit.slope = cxy / cxx;
  fit.intercept = ybar - fit.slope * xbar;
  if (weighted) {
    fit.slope_err = std::sqrt(1.0 / cxx);
    fit.intercept_err = std::sqrt(1.0 / s + xbar * xbar / cxx);
  } else {
    double ssr = 0.0;
    for (const auto& p : points) {
      const double e = p.y - (fit.intercept + fit.slope * p.x);
      ssr += e * e;
    }
    const double var = ssr / static_cast<double>(points.size() - 2);
    fit.slope_err = std::sqrt(var / cxx);
    fit.intercept_err = std::sqrt(var * (1.0 / s + xbar * xbar / cxx));
  }
  return fit;
}

}  // namespace qmagic
