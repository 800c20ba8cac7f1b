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


// Command-line front end: unitary, sweep, random-state, fit, lindblad-check.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmagic/experiment.hpp"
#include "qmagic/io.hpp"

namespace {

using nlohmann::json;
using qmagic::ExperimentConfig;

constexpr int kExitError = 1;
constexpr int kExitPartial = 3;
constexpr int kExitCheckFailed = 4;

// Flag values; every one that is set overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> model, stagger, propagator, out;
  std::optional<std::vector<int>> sizes;
  std::optional<std::vector<double>> gammas, gamma_grid;
  std::optional<double> J, V, W, dt, t_max, burn_in, t_floor, horizon_scale, relax_scale, max_gamma_dt;
  std::optional<int> sre_stride, n_traj, n_disorder, n_random, workers, save_trajectories;
  std::optional<std::uint64_t> seed;
  bool no_fit = false;
  bool progress = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config_path, "JSON config file; flags override its values")
      ->check(CLI::ExistingFile);
  app->add_option("--model", o.model, "xx, xxz or syk");
  app->add_option("-L,--sizes", o.sizes, "System sizes (even, 4..14)")->expected(1, -1);
  app->add_option("--J", o.J, "Hopping");
  app->add_option("--V", o.V, "Ising coupling (forced to 0 for xx)");
  app->add_option("--W", o.W, "Staggered field");
  app->add_option("--stagger", o.stagger, "one_based or zero_based");
  app->add_option("--gammas", o.gammas, "Measurement rates")->expected(1, -1);
  app->add_option("--gamma-grid", o.gamma_grid, "lo hi count: log-spaced rates")->expected(3);
  app->add_option("--dt", o.dt, "Time step");
  app->add_option("--t-max", o.t_max, "Longest horizon");
  app->add_option("--burn-in", o.burn_in, "Start of the averaging window");
  app->add_option("--sre-stride", o.sre_stride, "Steps between SRE samples at the base dt");
  app->add_option("--t-floor", o.t_floor, "Shortest monitored horizon");
  app->add_option("--horizon-scale", o.horizon_scale, "Monitored horizon scale c: max(t_floor, c/gamma)");
  app->add_option("--relax-scale", o.relax_scale, "Window start scale c: max(burn_in, c/gamma)");
  app->add_option("--max-gamma-dt", o.max_gamma_dt, "Upper bound on gamma*dt");
  app->add_option("--n-traj", o.n_traj, "Trajectories per point");
  app->add_option("--n-disorder", o.n_disorder, "SYK coupling realizations");
  app->add_option("--n-random", o.n_random, "Random states per size");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("-j,--workers", o.workers, "Worker threads");
  app->add_option("--propagator", o.propagator, "auto, eig or krylov");
  app->add_option("--save-trajectories", o.save_trajectories, "Trajectories per point written in full");
  app->add_option("-o,--out", o.out, "Output directory");
  app->add_flag("--no-fit", o.no_fit, "Skip the per-size Lorentzian fit");
  app->add_flag("--progress", o.progress, "Progress lines on stderr");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config_path.empty()) c = ExperimentConfig::from_json(qmagic::read_json(o.config_path));
  if (o.model) c.model = qmagic::parse_model(*o.model);
  if (o.stagger) c.stagger = qmagic::parse_stagger(*o.stagger);
  if (o.propagator) {
    if (*o.propagator == "auto") c.propagator.reset();
    else c.propagator = qmagic::parse_propagator_mode(*o.propagator);
  }
  if (o.out) c.output_dir = *o.out;
  if (o.sizes) c.sizes = *o.sizes;
  if (o.gammas) c.gammas = *o.gammas;
  if (o.gamma_grid) {
    const auto& g = *o.gamma_grid;
    c.gammas = qmagic::log_grid(g[0], g[1], static_cast<int>(g[2]));
  }
  auto set = [](auto& field, const auto& value) {
    if (value) field = *value;
  };
  set(c.J, o.J);
  set(c.V, o.V);
  set(c.W, o.W);
  set(c.dt, o.dt);
  set(c.t_max, o.t_max);
  set(c.burn_in, o.burn_in);
  set(c.t_floor, o.t_floor);
  set(c.horizon_scale, o.horizon_scale);
  set(c.relax_scale, o.relax_scale);
  set(c.max_gamma_dt, o.max_gamma_dt);
  set(c.sre_stride, o.sre_stride);
  set(c.n_traj, o.n_traj);
  set(c.n_disorder, o.n_disorder);
  set(c.n_random, o.n_random);
  set(c.workers, o.workers);
  set(c.save_trajectories, o.save_trajectories);
  set(c.master_seed, o.seed);
  if (o.no_fit) c.fit = false;
  if (o.progress) c.progress = true;
  c.normalize();
  return c;
}

void print(const json& j) { std::cout << j.dump(2) << std::endl; }

int fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"status", "error"}, {"error", kind}, {"message", message}}.dump() << std::endl;
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizer Renyi entropy of monitored spin chains and SYK"};
  app.set_version_flag("--version", std::string(qmagic::kVersion));
  app.require_subcommand(1);

  Overrides unitary_o, sweep_o, random_o, lindblad_o;
  auto* unitary = app.add_subcommand("unitary", "Unitary SRE time series and time averages vs L");
  add_common(unitary, unitary_o);
  auto* sweep = app.add_subcommand("sweep", "Monitored steady-state SRE over gamma and L, with fits");
  add_common(sweep, sweep_o);
  auto* random = app.add_subcommand("random-state", "Random-phase and Haar SRE baselines vs L");
  add_common(random, random_o);
  auto* lindblad = app.add_subcommand("lindblad-check", "Trajectory average of <sigma^z> vs Lindblad");
  add_common(lindblad, lindblad_o);

  std::string fit_in, fit_out = ".";
  auto* fit = app.add_subcommand("fit", "Generalized Lorentzian fits of an existing sweep.csv");
  fit->add_option("-i,--in", fit_in, "sweep.csv")->required()->check(CLI::ExistingFile);
  fit->add_option("-o,--out", fit_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    fail("usage", e.what());
    return e.get_exit_code() != 0 ? e.get_exit_code() : kExitError;
  }

  try {
    if (*unitary) {
      const auto cfg = resolve(unitary_o);
      const auto rows = qmagic::run_unitary(cfg);
      json out = json::array();
      for (const auto& r : rows)
        out.push_back({{"L", r.point.sites}, {"mean_sre", r.point.mean}, {"stderr", r.point.std_error},
                       {"phase_mean", r.phase.mean}, {"haar_mean", r.haar.mean}});
      print({{"status", "ok"}, {"command", "unitary"}, {"output_dir", cfg.output_dir.string()}, {"points", out}});
      return 0;
    }
    if (*sweep) {
      const auto cfg = resolve(sweep_o);
      const auto rep = qmagic::run_sweep(cfg);
      json fits = json::array();
      for (const auto& f : rep.fits)
        fits.push_back({{"L", f.sites}, {"A", f.fit.A}, {"gamma0", f.fit.gamma0}, {"b", f.fit.b},
                        {"residual_rms", f.fit.residual_rms}, {"converged", f.fit.converged}});
      const bool partial = rep.any_failed();
      print({{"status", partial ? "partial" : "ok"},
             {"command", "sweep"},
             {"output_dir", cfg.output_dir.string()},
             {"points", rep.rows.size()},
             {"fits", fits},
             {"errors", rep.errors}});
      return partial ? kExitPartial : 0;
    }
    if (*random) {
      const auto cfg = resolve(random_o);
      const auto stats = qmagic::run_random_states(cfg);
      json out = json::array();
      for (const auto& s : stats)
        out.push_back({{"kind", qmagic::to_string(s.kind)}, {"L", s.sites}, {"mean_sre", s.mean},
                       {"stderr", s.std_error}});
      print({{"status", "ok"}, {"command", "random-state"}, {"output_dir", cfg.output_dir.string()}, {"points", out}});
      return 0;
    }
    if (*lindblad) {
      const auto cfg = resolve(lindblad_o);
      const auto reports = qmagic::run_lindblad_check(cfg);
      json out = json::array();
      bool pass = true;
      for (const auto& r : reports) {
        out.push_back({{"gamma", r.gamma}, {"max_abs_z", r.max_abs_z}, {"verdict", r.pass ? "PASS" : "FAIL"},
                       {"low_power", r.low_power}});
        pass = pass && r.pass;
      }
      print({{"status", "ok"},
             {"command", "lindblad-check"},
             {"verdict", pass ? "PASS" : "FAIL"},
             {"output_dir", cfg.output_dir.string()},
             {"checks", out}});
      return pass ? 0 : kExitCheckFailed;
    }
    if (*fit) {
      const auto fits = qmagic::run_fit(fit_in, fit_out);
      json out = json::array();
      for (const auto& f : fits)
        out.push_back({{"model", qmagic::to_string(f.model)}, {"L", f.sites}, {"A", f.fit.A},
                       {"gamma0", f.fit.gamma0}, {"b", f.fit.b}, {"converged", f.fit.converged}});
      print({{"status", "ok"}, {"command", "fit"}, {"output_dir", fit_out}, {"fits", out}});
      return 0;
    }
  } catch (const qmagic::IoError& e) {
    return fail("io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what());
  } catch (const qmagic::CapacityError& e) {
    return fail("capacity", e.what());
  } catch (const qmagic::IntegrationFailure& e) {
    return fail("integration_failure", e.what());
  } catch (const qmagic::NumericalIntegrityError& e) {
    return fail("numerical_integrity", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return kExitError;
}
