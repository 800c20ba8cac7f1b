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
#include <memory>
#include <span>
#include <vector>

#include "qmagic/common.hpp"
#include "qmagic/evolution.hpp"
#include "qmagic/hamiltonian.hpp"
#include "qmagic/hilbert.hpp"
#include "qmagic/magic.hpp"

namespace qmagic {

/// Quantum-state-diffusion run parameters. Times are in units of 1/J.
struct MonitoringParams {
  double gamma = 0.0;
  double dt = 0.01;
  double t_max = 50.0;
  /// Steps between recorded samples.
  int sre_stride = 10;
  /// Start of the steady-state averaging window.
  double burn_in = 10.0;
  /// Samples before this time are not recorded (0 = record from t = 0).
  double record_start = 0.0;
  bool record_sre = true;
  bool record_sz = false;

  /// Throws std::invalid_argument on gamma < 0, dt <= 0, stride < 1 or
  /// burn_in >= t_max.
  void validate() const;
  long steps() const;
};

/// Per-site Wiener increments for one step, each Normal(0, gamma * dt).
struct NoiseSample {
  RVector xi;
};

NoiseSample draw_noise(int sites, double gamma, double dt, Rng& rng);
NoiseSample zero_noise(int sites);

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> sre;
  /// sz[k][l] = <sigma^z_{l+1}> at times[k]; empty unless requested.
  std::vector<std::vector<double>> sz;
  double norm_drift = 0.0;
};

/// dim x L table of spins s_l(config) = +-1.
RMatrix spin_table(const SubspaceBasis& basis);

/// <sigma^z_l> for l = 1..L.
RVector sigma_z_expectations(const StateVector& psi);
RVector sigma_z_expectations(const CVector& amps, const RMatrix& spins);

/// One Trotterized QSD step: unitary factor, then the diagonal weights
/// exp(sum_l s_l [xi_l + 2 gamma dt <sigma^z_l>]) with <sigma^z_l> taken on
/// the incoming state, then renormalization.
StateVector qsd_step(const StateVector& psi, const Propagator& prop, const MonitoringParams& params,
                     const NoiseSample& noise);

/// In-place variant over raw amplitudes; returns |norm after step - 1|.
double qsd_step_inplace(CVector& amps, const FixedStep& step, const RMatrix& spins, double gamma,
                        const RVector& xi);

/// Neel-initialized trajectory driven by Rng(seed).
TrajectoryRecord run_trajectory(const FixedStep& step, const BasisPtr& basis, const MonitoringParams& params,
                                std::uint64_t seed, const SreOptions& sre_opts = {});
TrajectoryRecord run_trajectory(std::shared_ptr<const HamiltonianOperator> h, const MonitoringParams& params,
                                std::uint64_t seed, const SreOptions& sre_opts = {});

/// Seed of trajectory `index` in an ensemble with `master_seed`.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::size_t index) noexcept;

/// Runs `n_traj` trajectories; trajectory i evolves under
/// steps[i % steps.size()] with seed trajectory_seed(master_seed, i).
/// Records come back in index order whatever the worker count.
std::vector<TrajectoryRecord> run_ensemble(std::span<const std::shared_ptr<const FixedStep>> steps,
                                           const BasisPtr& basis, const MonitoringParams& params,
                                           std::uint64_t master_seed, int n_traj, int workers,
                                           const SreOptions& sre_opts = {});

struct DensityMatrix {
  BasisPtr basis;
  CMatrix rho;

  static DensityMatrix pure(const StateVector& psi);
  double trace_defect() const;
  double hermiticity_defect() const;
  /// Most negative eigenvalue (0 if positive semidefinite).
  double min_eigenvalue() const;
};

RVector sigma_z_expectations(const DensityMatrix& rho);

struct LindbladSample {
  double t = 0.0;
  DensityMatrix rho;
};

/// RK4 integration of d rho/dt = -i[H, rho] + gamma sum_j (Z_j rho Z_j - rho)
/// up to t_max with step dt_rk, keeping every `record_every`-th state (and
/// t = 0). Oracle use only: L <= 6. Throws IntegrationFailure when the trace
/// drifts by more than 1e-6.
std::vector<LindbladSample> lindblad_evolve(const DensityMatrix& rho0, const HamiltonianOperator& h, double gamma,
                                            double t_max, double dt_rk, int record_every = 1);

}  // namespace qmagic
