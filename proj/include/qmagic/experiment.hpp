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
#include <filesystem>
#include <functional>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmagic/analysis.hpp"
#include "qmagic/evolution.hpp"
#include "qmagic/hamiltonian.hpp"
#include "qmagic/monitoring.hpp"
#include "qmagic/randomstates.hpp"

namespace qmagic {

inline constexpr const char* kVersion = "0.1.0";

/// `count` points spaced evenly in log between lo and hi, both included.
std::vector<double> log_grid(double lo, double hi, int count);

/// Everything a run needs. Monitored runs use a gamma-dependent schedule
/// (see `schedule_for`); unitary runs sample [0, t_max] every
/// sre_stride * dt and average over [burn_in, t_max].
struct ExperimentConfig {
  Model model = Model::xxz;
  std::vector<int> sizes{8};
  double J = 1.0;
  double V = 1.0;
  double W = 1.0;
  Stagger stagger = Stagger::zero_based;
  std::vector<double> gammas = log_grid(1e-2, 1e1, 12);

  double dt = 0.01;
  double t_max = 1000.0;
  double burn_in = 10.0;
  int sre_stride = 10;
  /// Monitored horizon is max(t_floor, horizon_scale / gamma), capped at t_max.
  double t_floor = 200.0;
  double horizon_scale = 10.0;
  /// Monitored window starts at max(burn_in, relax_scale / gamma).
  double relax_scale = 1.0;
  /// The monitored step is shrunk so that gamma * dt <= max_gamma_dt.
  double max_gamma_dt = 0.01;

  int n_traj = 48;
  /// SYK coupling realizations. Monitored trajectory i uses realization
  /// i mod n_disorder; unitary runs average over all of them.
  int n_disorder = 1;
  /// Random states per size for the baselines.
  int n_random = 50;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::optional<PropagatorMode> propagator;
  /// Fit the generalized Lorentzian per size after a sweep.
  bool fit = true;
  /// Trajectories per sweep point written out in full.
  int save_trajectories = 0;
  std::filesystem::path output_dir = "out";
  /// Progress lines on stderr.
  bool progress = false;

  /// Forces V = 0 for the XX chain, then checks every field. Throws
  /// std::invalid_argument naming the offending key.
  void normalize();

  nlohmann::json to_json() const;
  /// Unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Step, horizon and averaging window of one monitored (gamma) point.
struct PointSchedule {
  double dt = 0.0;
  double t_max = 0.0;
  double t0 = 0.0;
  int sre_stride = 1;
};

PointSchedule schedule_for(const ExperimentConfig& cfg, double gamma);

/// Hamiltonian of `cfg.model` on `basis`. For SYK, `realization` selects
/// the coupling draw; it is ignored for the chains.
std::shared_ptr<const HamiltonianOperator> build_model(const ExperimentConfig& cfg, const BasisPtr& basis,
                                                       int realization);

/// Coupling seed of SYK realization r at size L.
std::uint64_t disorder_seed(std::uint64_t master, int sites, int realization) noexcept;

/// Calls visit(k, psi(times[k])) for ascending times >= 0, starting from
/// psi0. Eig mode evaluates every sample directly from the spectrum.
void evolve_samples(const Propagator& prop, const StateVector& psi0, std::span<const double> times,
                    const std::function<void(std::size_t, const StateVector&)>& visit);

struct UnitaryPoint {
  Model model = Model::xxz;
  int sites = 0;
  int realizations = 0;
  /// Time average over [burn_in, t_max]. For several realizations the error
  /// is the spread of realization averages over sqrt(count); for a single
  /// one it is the block-mean estimate of the series.
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> times;
  /// Realization mean of M2(t) and its standard error (zero for one draw).
  std::vector<double> sre;
  std::vector<double> sre_err;
};

UnitaryPoint unitary_point(const ExperimentConfig& cfg, int sites);

/// Random-state baseline used by the unitary summary and `random-state`.
RandomSreStats random_baseline(const ExperimentConfig& cfg, RandomStateKind kind, int sites);

/// Monitored ensemble at one (gamma, L). Trajectory records are moved into
/// `keep` when it is given.
SweepPoint sweep_point(const ExperimentConfig& cfg, int sites, std::size_t gamma_index,
                       std::vector<TrajectoryRecord>* keep = nullptr);

struct SweepRow {
  Model model = Model::xxz;
  SweepPoint point;
  double dt = 0.0;
  /// "ok", "nonstationary" or "failed".
  std::string status = "ok";
  std::string message;
};

struct FitRow {
  Model model = Model::xxz;
  int sites = 0;
  FitResult fit;
};

struct SlopeRow {
  Model model = Model::xxz;
  double gamma = 0.0;
  int sizes = 0;
  LinearFit line;
};

/// Per-size Lorentzian fits over the successful rows of a sweep. Sizes with
/// too few points are skipped and reported in `errors`.
std::vector<FitRow> fit_sweep(std::span<const SweepRow> rows, std::vector<std::string>* errors = nullptr);

/// Slope of the steady SRE versus L at every gamma with >= 3 sizes.
std::vector<SlopeRow> slopes_vs_size(std::span<const SweepRow> rows);

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<FitRow> fits;
  std::vector<SlopeRow> slopes;
  std::vector<std::string> errors;
  bool any_failed() const;
};

struct LindbladCheckRow {
  double t = 0.0;
  int site = 0;
  double trajectory_mean = 0.0;
  double trajectory_err = 0.0;
  double lindblad = 0.0;
  double z = 0.0;
};

struct LindbladCheckReport {
  int sites = 0;
  double gamma = 0.0;
  int n_traj = 0;
  std::vector<LindbladCheckRow> rows;
  double max_abs_z = 0.0;
  bool pass = false;
  /// Fewer than 100 trajectories: the check has little power.
  bool low_power = false;
};

/// Trajectory-averaged <sigma^z_l>(t) against the Lindblad integration from
/// the Neel state over [0, t_max], both sampled every sre_stride * dt with
/// step dt. PASS iff every |z| <= 4. A trajectory spread below 1e-12 counts as
/// |z| = 0 when the two values agree to 1e-8, infinite otherwise.
LindbladCheckReport lindblad_check(const ExperimentConfig& cfg, int sites, double gamma);

// Runners behind the command-line subcommands. Each writes its tables and a
// manifest.json into cfg.output_dir.

struct UnitaryRow {
  UnitaryPoint point;
  RandomSreStats phase;
  RandomSreStats haar;
};

std::vector<UnitaryRow> run_unitary(const ExperimentConfig& cfg);
SweepReport run_sweep(const ExperimentConfig& cfg);
std::vector<RandomSreStats> run_random_states(const ExperimentConfig& cfg);
/// Fits every (model, L) group of a sweep table and writes fits.csv.
std::vector<FitRow> run_fit(const std::filesystem::path& sweep_csv, const std::filesystem::path& output_dir);
/// One report per gamma in cfg.gammas, at the single size in cfg.sizes.
std::vector<LindbladCheckReport> run_lindblad_check(const ExperimentConfig& cfg);

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);
void write_fits_csv(std::span<const FitRow> rows, const std::filesystem::path& path);
void write_slopes_csv(std::span<const SlopeRow> rows, const std::filesystem::path& path);

/// Columns t, sre[, sz_1..sz_L], plus a JSON sidecar next to it.
void write_trajectory(const TrajectoryRecord& rec, const nlohmann::json& meta, const std::filesystem::path& csv_path);

}  // namespace qmagic
