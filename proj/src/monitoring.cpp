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

#include "qmagic/monitoring.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qmagic/parallel.hpp"

namespace qmagic {

namespace {

constexpr int kMaxLindbladSites = 6;
constexpr std::uint64_t kNoiseDomain = 0x6E6F697365ULL;

// Multiplies by the measurement factor and renormalizes. `mz` must be the
// magnetization of the state before the unitary factor was applied.
double apply_measurement(CVector& amps, const RMatrix& spins, const RVector& mz, double gamma, double dt,
                         const RVector& xi) {
  const RVector field = xi + (2.0 * gamma * dt) * mz;
  RVector exponent = spins * field;
  exponent.array() -= exponent.maxCoeff();
  amps.array() *= exponent.array().exp().cast<Complex>();
  const double n = amps.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalIntegrityError("qsd_step: state lost its norm");
  amps /= n;
  return std::abs(amps.norm() - 1.0);
}

}  // namespace

void MonitoringParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (sre_stride < 1) throw std::invalid_argument("sre_stride must be >= 1");
  if (!(burn_in < t_max)) throw std::invalid_argument("burn_in must be smaller than t_max");
}

long MonitoringParams::steps() const { return std::lround(t_max / dt); }

NoiseSample draw_noise(int sites, double gamma, double dt, Rng& rng) {
  NoiseSample n{RVector::Zero(sites)};
  if (gamma > 0.0) {
    std::normal_distribution<double> dist(0.0, std::sqrt(gamma * dt));
    for (int l = 0; l < sites; ++l) n.xi[l] = dist(rng);
  }
  return n;
}

NoiseSample zero_noise(int sites) { return {RVector::Zero(sites)}; }

RMatrix spin_table(const SubspaceBasis& basis) {
  const int L = basis.sites();
  RMatrix s(static_cast<Eigen::Index>(basis.dim()), L);
  for (std::size_t i = 0; i < basis.dim(); ++i)
    for (int l = 1; l <= L; ++l) s(static_cast<Eigen::Index>(i), l - 1) = basis[i].spin(l);
  return s;
}

RVector sigma_z_expectations(const CVector& amps, const RMatrix& spins) {
  return spins.transpose() * amps.cwiseAbs2();
}

RVector sigma_z_expectations(const StateVector& psi) {
  return sigma_z_expectations(psi.amps(), spin_table(psi.basis()));
}

StateVector qsd_step(const StateVector& psi, const Propagator& prop, const MonitoringParams& params,
                     const NoiseSample& noise) {
  if (noise.xi.size() != psi.sites()) throw std::invalid_argument("qsd_step: noise has wrong number of sites");
  const RMatrix spins = spin_table(psi.basis());
  const RVector mz = sigma_z_expectations(psi.amps(), spins);
  CVector amps = prop.apply(psi.amps(), params.dt);
  apply_measurement(amps, spins, mz, params.gamma, params.dt, noise.xi);
  return StateVector(psi.basis_ptr(), std::move(amps));
}

double qsd_step_inplace(CVector& amps, const FixedStep& step, const RMatrix& spins, double gamma,
                        const RVector& xi) {
  const RVector mz = sigma_z_expectations(amps, spins);
  step.apply_inplace(amps);
  return apply_measurement(amps, spins, mz, gamma, step.dt(), xi);
}

TrajectoryRecord run_trajectory(const FixedStep& step, const BasisPtr& basis, const MonitoringParams& params,
                                std::uint64_t seed, const SreOptions& sre_opts) {
  params.validate();
  if (std::abs(step.dt() - params.dt) > 1e-15 * params.dt)
    throw std::invalid_argument("run_trajectory: step size does not match params.dt");
  const int L = basis->sites();
  const RMatrix spins = spin_table(*basis);
  StateVector psi = neel_state(basis);
  Rng rng(seed);

  TrajectoryRecord rec;
  rec.seed = seed;
  const long nsteps = params.steps();
  auto record = [&](long k) {
    const double t = static_cast<double>(k) * params.dt;
    if (t + 1e-9 * params.dt < params.record_start) return;
    rec.times.push_back(t);
    if (params.record_sre) rec.sre.push_back(sre(psi, sre_opts));
    if (params.record_sz) {
      const RVector mz = sigma_z_expectations(psi.amps(), spins);
      rec.sz.emplace_back(mz.data(), mz.data() + mz.size());
    }
  };

  record(0);
  for (long k = 1; k <= nsteps; ++k) {
    const NoiseSample noise = draw_noise(L, params.gamma, params.dt, rng);
    rec.norm_drift = std::max(rec.norm_drift, qsd_step_inplace(psi.amps(), step, spins, params.gamma, noise.xi));
    if (k % params.sre_stride == 0) record(k);
  }
  return rec;
}

TrajectoryRecord run_trajectory(std::shared_ptr<const HamiltonianOperator> h, const MonitoringParams& params,
                                std::uint64_t seed, const SreOptions& sre_opts) {
  const BasisPtr basis = h->basis;
  auto prop = std::make_shared<const Propagator>(make_propagator(std::move(h)));
  const FixedStep step(prop, params.dt);
  return run_trajectory(step, basis, params, seed, sre_opts);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t index) noexcept {
  return derive_seed(master_seed, index, kNoiseDomain);
}

std::vector<TrajectoryRecord> run_ensemble(std::span<const std::shared_ptr<const FixedStep>> steps,
                                           const BasisPtr& basis, const MonitoringParams& params,
                                           std::uint64_t master_seed, int n_traj, int workers,
                                           const SreOptions& sre_opts) {
  if (steps.empty()) throw std::invalid_argument("run_ensemble: no propagators");
  if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
  params.validate();
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(n_traj));
  SreOptions inner = sre_opts;
  inner.workers = 1;
  parallel_for(out.size(), workers, [&](std::size_t i) {
    out[i] = run_trajectory(*steps[i % steps.size()], basis, params, trajectory_seed(master_seed, i), inner);
  });
  return out;
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return {psi.basis_ptr(), psi.amps() * psi.amps().adjoint()};
}

double DensityMatrix::trace_defect() const { return std::abs(rho.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  return std::min(0.0, es.eigenvalues().minCoeff());
}

RVector sigma_z_expectations(const DensityMatrix& rho) {
  return spin_table(*rho.basis).transpose() * rho.rho.diagonal().real();
}

std::vector<LindbladSample> lindblad_evolve(const DensityMatrix& rho0, const HamiltonianOperator& h, double gamma,
                                            double t_max, double dt_rk, int record_every) {
  const auto& basis = *rho0.basis;
  if (basis.sites() > kMaxLindbladSites)
    throw CapacityError("lindblad_evolve is an oracle for L <= 6, got L=" + std::to_string(basis.sites()));
  if (h.dim() != static_cast<Eigen::Index>(basis.dim()) || rho0.rho.rows() != h.dim())
    throw std::invalid_argument("lindblad_evolve: dimension mismatch");
  if (!(dt_rk > 0.0) || !(t_max > 0.0) || gamma < 0.0 || record_every < 1)
    throw std::invalid_argument("lindblad_evolve: invalid step, horizon, rate or stride");

  // Z_j rho Z_j - rho summed over j is elementwise -2 d(a, b) rho_ab, with d
  // the number of sites where configurations a and b differ.
  const auto n = static_cast<Eigen::Index>(basis.dim());
  RMatrix decay(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      decay(a, b) = -2.0 * gamma *
                    std::popcount(basis[static_cast<std::size_t>(a)].bits ^ basis[static_cast<std::size_t>(b)].bits);
  const CMatrix& H = h.dense;
  auto rhs = [&](const CMatrix& r) -> CMatrix {
    CMatrix out = -kI * (H * r - r * H);
    out.array() += decay.array().cast<Complex>() * r.array();
    return out;
  };

  std::vector<LindbladSample> series;
  DensityMatrix cur = rho0;
  series.push_back({0.0, cur});
  const long nsteps = std::lround(t_max / dt_rk);
  for (long k = 1; k <= nsteps; ++k) {
    const CMatrix& r = cur.rho;
    const CMatrix k1 = rhs(r);
    const CMatrix k2 = rhs(r + 0.5 * dt_rk * k1);
    const CMatrix k3 = rhs(r + 0.5 * dt_rk * k2);
    const CMatrix k4 = rhs(r + dt_rk * k3);
    cur.rho = r + (dt_rk / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(cur.trace_defect() <= 1e-6) || !cur.rho.allFinite())
      throw IntegrationFailure("lindblad_evolve: trace drifted by " + std::to_string(cur.trace_defect()) +
                               " at t=" + std::to_string(k * dt_rk) + "; reduce dt_rk");
    if (k % record_every == 0) series.push_back({static_cast<double>(k) * dt_rk, cur});
  }
  return series;
}

}  // namespace qmagic
