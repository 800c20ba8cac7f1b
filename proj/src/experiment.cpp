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


#include "qmagic/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "qmagic/io.hpp"
#include "qmagic/parallel.hpp"

namespace qmagic {

namespace {

using nlohmann::json;

constexpr std::uint64_t kDisorderDomain = 0x646973ULL;
constexpr std::uint64_t kSweepDomain = 0x7377ULL;
constexpr std::uint64_t kPhaseDomain = 0x7068ULL;
constexpr std::uint64_t kHaarDomain = 0x6861ULL;
constexpr std::uint64_t kLindbladDomain = 0x6C62ULL;

// Trajectory spread below this is round-off of identical trajectories.
constexpr double kDeterministicSpread = 1e-12;

std::uint64_t point_seed(std::uint64_t master, int sites, std::size_t gamma_index) noexcept {
  return derive_seed(master, (static_cast<std::uint64_t>(sites) << 32) | gamma_index, kSweepDomain);
}

std::uint64_t random_seed(std::uint64_t master, RandomStateKind kind, int sites) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(sites), kind == RandomStateKind::phase ? kPhaseDomain
                                                                                                 : kHaarDomain);
}

int realizations_of(const ExperimentConfig& cfg) { return cfg.model == Model::syk ? cfg.n_disorder : 1; }

std::string d(double x) { return format_double(x); }

std::string clean(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

json base_manifest(const ExperimentConfig& cfg, const std::string& command) {
  json m;
  m["tool"] = "qmagic";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = cfg.to_json();
  if (cfg.model == Model::syk) {
    json seeds = json::object();
    for (int L : cfg.sizes) {
      json per = json::array();
      for (int r = 0; r < cfg.n_disorder; ++r) per.push_back(disorder_seed(cfg.master_seed, L, r));
      seeds[std::to_string(L)] = per;
    }
    m["disorder_seeds"] = seeds;
  }
  return m;
}

class Progress {
 public:
  explicit Progress(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
  template <class... Args>
  void operator()(const Args&... args) const {
    if (!on_) return;
    std::ostringstream os;
    os.precision(6);
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    os << "[" << static_cast<long>(el) << "s] ";
    (os << ... << args);
    std::cerr << os.str() << '\n';
  }

 private:
  bool on_;
  std::chrono::steady_clock::time_point start_;
};

// Basis and one propagator per disorder realization for a size.
struct SizeContext {
  BasisPtr basis;
  std::vector<std::shared_ptr<const Propagator>> props;
};

SizeContext prepare_size(const ExperimentConfig& cfg, int sites) {
  SizeContext ctx;
  ctx.basis = enumerate_basis(sites);
  for (int r = 0; r < realizations_of(cfg); ++r)
    ctx.props.push_back(
        std::make_shared<const Propagator>(make_propagator(build_model(cfg, ctx.basis, r), cfg.propagator)));
  return ctx;
}

SweepPoint run_point(const ExperimentConfig& cfg, const SizeContext& ctx, std::size_t gamma_index,
                     std::vector<TrajectoryRecord>* keep) {
  const double gamma = cfg.gammas.at(gamma_index);
  const PointSchedule sch = schedule_for(cfg, gamma);
  std::vector<std::shared_ptr<const FixedStep>> steps;
  for (const auto& p : ctx.props) steps.push_back(std::make_shared<const FixedStep>(p, sch.dt));

  MonitoringParams mp;
  mp.gamma = gamma;
  mp.dt = sch.dt;
  mp.t_max = sch.t_max;
  mp.sre_stride = sch.sre_stride;
  mp.burn_in = sch.t0;
  mp.record_start = sch.t0;
  mp.record_sz = keep != nullptr && cfg.save_trajectories > 0;

  const int sites = ctx.basis->sites();
  auto recs = run_ensemble(steps, ctx.basis, mp, point_seed(cfg.master_seed, sites, gamma_index), cfg.n_traj,
                           cfg.workers);
  SweepPoint p = steady_average(recs, sch.t0, sch.t_max);
  p.gamma = gamma;
  p.sites = sites;
  if (keep) *keep = std::move(recs);
  return p;
}

template <class T>
T get_checked(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

void ExperimentConfig::normalize() {
  if (model == Model::xx) V = 0.0;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(!sizes.empty(), "sizes must not be empty");
  for (int L : sizes) require(L >= 4 && L <= 14 && L % 2 == 0, "sizes must be even and in [4, 14]");
  require(std::isfinite(J) && std::isfinite(V) && std::isfinite(W), "J, V, W must be finite");
  if (model == Model::syk) require(J > 0.0, "J must be positive for syk");
  for (double g : gammas) require(std::isfinite(g) && g >= 0.0, "gammas must be finite and >= 0");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(t_max > 0.0 && std::isfinite(t_max), "t_max must be positive");
  require(burn_in >= 0.0, "burn_in must be >= 0");
  require(sre_stride >= 1, "sre_stride must be >= 1");
  require(t_floor > 0.0, "t_floor must be positive");
  require(horizon_scale >= 0.0 && relax_scale >= 0.0, "horizon_scale and relax_scale must be >= 0");
  require(max_gamma_dt > 0.0, "max_gamma_dt must be positive");
  require(n_traj >= 1, "n_traj must be >= 1");
  require(n_disorder >= 1, "n_disorder must be >= 1");
  require(n_random >= 1, "n_random must be >= 1");
  require(workers >= 1, "workers must be >= 1");
  require(save_trajectories >= 0, "save_trajectories must be >= 0");
}

json ExperimentConfig::to_json() const {
  json j;
  j["model"] = std::string(to_string(model));
  j["sizes"] = sizes;
  j["J"] = J;
  j["V"] = V;
  j["W"] = W;
  j["stagger"] = std::string(to_string(stagger));
  j["gammas"] = gammas;
  j["dt"] = dt;
  j["t_max"] = t_max;
  j["burn_in"] = burn_in;
  j["sre_stride"] = sre_stride;
  j["t_floor"] = t_floor;
  j["horizon_scale"] = horizon_scale;
  j["relax_scale"] = relax_scale;
  j["max_gamma_dt"] = max_gamma_dt;
  j["n_traj"] = n_traj;
  j["n_disorder"] = n_disorder;
  j["n_random"] = n_random;
  j["master_seed"] = master_seed;
  j["workers"] = workers;
  j["propagator"] = propagator ? std::string(to_string(*propagator)) : std::string("auto");
  j["fit"] = fit;
  j["save_trajectories"] = save_trajectories;
  j["output_dir"] = output_dir.string();
  j["progress"] = progress;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "model") c.model = parse_model(get_checked<std::string>(j, k));
    else if (key == "sizes") c.sizes = get_checked<std::vector<int>>(j, k);
    else if (key == "J") c.J = get_checked<double>(j, k);
    else if (key == "V") c.V = get_checked<double>(j, k);
    else if (key == "W") c.W = get_checked<double>(j, k);
    else if (key == "stagger") c.stagger = parse_stagger(get_checked<std::string>(j, k));
    else if (key == "gammas") c.gammas = get_checked<std::vector<double>>(j, k);
    else if (key == "dt") c.dt = get_checked<double>(j, k);
    else if (key == "t_max") c.t_max = get_checked<double>(j, k);
    else if (key == "burn_in") c.burn_in = get_checked<double>(j, k);
    else if (key == "sre_stride") c.sre_stride = get_checked<int>(j, k);
    else if (key == "t_floor") c.t_floor = get_checked<double>(j, k);
    else if (key == "horizon_scale") c.horizon_scale = get_checked<double>(j, k);
    else if (key == "relax_scale") c.relax_scale = get_checked<double>(j, k);
    else if (key == "max_gamma_dt") c.max_gamma_dt = get_checked<double>(j, k);
    else if (key == "n_traj") c.n_traj = get_checked<int>(j, k);
    else if (key == "n_disorder") c.n_disorder = get_checked<int>(j, k);
    else if (key == "n_random") c.n_random = get_checked<int>(j, k);
    else if (key == "master_seed") c.master_seed = get_checked<std::uint64_t>(j, k);
    else if (key == "workers") c.workers = get_checked<int>(j, k);
    else if (key == "propagator") {
      const auto name = get_checked<std::string>(j, k);
      if (name == "auto") c.propagator.reset();
      else c.propagator = parse_propagator_mode(name);
    } else if (key == "fit") c.fit = get_checked<bool>(j, k);
    else if (key == "save_trajectories") c.save_trajectories = get_checked<int>(j, k);
    else if (key == "output_dir") c.output_dir = get_checked<std::string>(j, k);
    else if (key == "progress") c.progress = get_checked<bool>(j, k);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return c;
}

PointSchedule schedule_for(const ExperimentConfig& cfg, double gamma) {
  PointSchedule s;
  if (gamma <= 0.0) {
    s.dt = cfg.dt;
    s.t_max = cfg.t_max;
    s.t0 = cfg.burn_in;
    s.sre_stride = cfg.sre_stride;
    return s;
  }
  s.dt = std::min(cfg.dt, cfg.max_gamma_dt / gamma);
  s.t_max = std::min(cfg.t_max, std::max(cfg.t_floor, cfg.horizon_scale / gamma));
  s.t0 = std::max(cfg.burn_in, cfg.relax_scale / gamma);
  s.sre_stride = std::max(1, static_cast<int>(std::lround(cfg.sre_stride * cfg.dt / s.dt)));
  if (!(s.t0 < s.t_max)) {
    std::ostringstream msg;
    msg << "gamma=" << gamma << ": averaging window starts at " << s.t0 << " but the horizon is " << s.t_max;
    throw std::invalid_argument(msg.str());
  }
  return s;
}

std::uint64_t disorder_seed(std::uint64_t master, int sites, int realization) noexcept {
  return derive_seed(master, (static_cast<std::uint64_t>(sites) << 32) | static_cast<std::uint32_t>(realization),
                     kDisorderDomain);
}

std::shared_ptr<const HamiltonianOperator> build_model(const ExperimentConfig& cfg, const BasisPtr& basis,
                                                       int realization) {
  if (cfg.model == Model::syk) {
    const auto c = sample_syk_couplings(basis->sites(), cfg.J,
                                        disorder_seed(cfg.master_seed, basis->sites(), realization));
    return std::make_shared<const HamiltonianOperator>(build_syk(basis, c));
  }
  const double V = cfg.model == Model::xx ? 0.0 : cfg.V;
  return std::make_shared<const HamiltonianOperator>(build_xxz(basis, {cfg.J, V, cfg.W, cfg.stagger}));
}

void evolve_samples(const Propagator& prop, const StateVector& psi0, std::span<const double> times,
                    const std::function<void(std::size_t, const StateVector&)>& visit) {
  if (prop.mode() == PropagatorMode::eig) {
    const CMatrix& vecs = prop.eigenvectors();
    const RVector& vals = prop.eigenvalues();
    const CVector coeffs = vecs.adjoint() * psi0.amps();
    for (std::size_t k = 0; k < times.size(); ++k) {
      const CVector phased = ((-kI * times[k]) * vals.cast<Complex>()).array().exp() * coeffs.array();
      visit(k, StateVector(psi0.basis_ptr(), vecs * phased));
    }
    return;
  }
  StateVector psi = psi0;
  double now = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < now) throw std::invalid_argument("evolve_samples: times must be ascending");
    if (times[k] > now) psi = apply_unitary(prop, psi, times[k] - now);
    now = times[k];
    visit(k, psi);
  }
}

UnitaryPoint unitary_point(const ExperimentConfig& cfg, int sites) {
  if (!(cfg.burn_in < cfg.t_max)) throw std::invalid_argument("invalid config: burn_in must be below t_max");
  const BasisPtr basis = enumerate_basis(sites);
  const int nreal = realizations_of(cfg);
  const double interval = cfg.sre_stride * cfg.dt;
  const long nsamples = std::lround(cfg.t_max / interval);

  UnitaryPoint out;
  out.model = cfg.model;
  out.sites = sites;
  out.realizations = nreal;
  for (long k = 0; k <= nsamples; ++k) out.times.push_back(static_cast<double>(k) * interval);

  SreOptions sre_opts;
  sre_opts.workers = nreal == 1 ? cfg.workers : 1;
  std::vector<std::vector<double>> series(static_cast<std::size_t>(nreal));
  parallel_for(series.size(), cfg.workers, [&](std::size_t r) {
    const Propagator prop = make_propagator(build_model(cfg, basis, static_cast<int>(r)), cfg.propagator);
    series[r].resize(out.times.size());
    evolve_samples(prop, neel_state(basis), out.times,
                   [&](std::size_t k, const StateVector& psi) { series[r][k] = sre(psi, sre_opts); });
  });

  std::vector<double> column(static_cast<std::size_t>(nreal));
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    for (std::size_t r = 0; r < series.size(); ++r) column[r] = series[r][k];
    const MeanError me = mean_and_error(column);
    out.sre.push_back(me.mean);
    out.sre_err.push_back(me.std_error);
  }

  if (nreal == 1) {
    const TimeAverage ta = time_average(out.times, series[0], cfg.burn_in, cfg.t_max);
    out.mean = ta.mean;
    out.std_error = ta.std_error;
  } else {
    std::vector<double> averages;
    for (const auto& s : series) averages.push_back(time_average(out.times, s, cfg.burn_in, cfg.t_max).mean);
    const MeanError me = mean_and_error(averages);
    out.mean = me.mean;
    out.std_error = me.std_error;
  }
  return out;
}

RandomSreStats random_baseline(const ExperimentConfig& cfg, RandomStateKind kind, int sites) {
  return random_state_sre(kind, sites, cfg.n_random, random_seed(cfg.master_seed, kind, sites), cfg.workers);
}

SweepPoint sweep_point(const ExperimentConfig& cfg, int sites, std::size_t gamma_index,
                       std::vector<TrajectoryRecord>* keep) {
  return run_point(cfg, prepare_size(cfg, sites), gamma_index, keep);
}

bool SweepReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == "failed"; });
}

std::vector<FitRow> fit_sweep(std::span<const SweepRow> rows, std::vector<std::string>* errors) {
  std::map<std::pair<int, int>, std::vector<FitPoint>> groups;
  for (const auto& r : rows) {
    if (r.status == "failed" || r.point.gamma <= 0.0) continue;
    groups[{static_cast<int>(r.model), r.point.sites}].push_back({r.point.gamma, r.point.mean, r.point.std_error});
  }
  std::vector<FitRow> out;
  for (auto& [key, pts] : groups) {
    std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) { return a.x < b.x; });
    FitRow row;
    row.model = static_cast<Model>(key.first);
    row.sites = key.second;
    try {
      row.fit = fit_generalized_lorentzian(pts);
      out.push_back(std::move(row));
    } catch (const std::exception& e) {
      if (errors)
        errors->push_back(std::string(to_string(row.model)) + " L=" + std::to_string(row.sites) + ": " + e.what());
    }
  }
  return out;
}

std::vector<SlopeRow> slopes_vs_size(std::span<const SweepRow> rows) {
  std::map<std::pair<int, double>, std::vector<FitPoint>> groups;
  for (const auto& r : rows) {
    if (r.status == "failed") continue;
    groups[{static_cast<int>(r.model), r.point.gamma}].push_back(
        {static_cast<double>(r.point.sites), r.point.mean, r.point.std_error});
  }
  std::vector<SlopeRow> out;
  for (auto& [key, pts] : groups) {
    std::set<double> distinct;
    for (const auto& p : pts) distinct.insert(p.x);
    if (distinct.size() < 3) continue;
    out.push_back({static_cast<Model>(key.first), key.second, static_cast<int>(pts.size()), fit_linear(pts)});
  }
  return out;
}

LindbladCheckReport lindblad_check(const ExperimentConfig& cfg, int sites, double gamma) {
  const BasisPtr basis = enumerate_basis(sites);
  const auto h = build_model(cfg, basis, 0);
  auto prop = std::make_shared<const Propagator>(make_propagator(h, cfg.propagator));
  const std::vector<std::shared_ptr<const FixedStep>> steps{std::make_shared<const FixedStep>(prop, cfg.dt)};

  MonitoringParams mp;
  mp.gamma = gamma;
  mp.dt = cfg.dt;
  mp.t_max = cfg.t_max;
  mp.sre_stride = cfg.sre_stride;
  mp.burn_in = 0.0;
  mp.record_sre = false;
  mp.record_sz = true;
  const auto recs = run_ensemble(steps, basis, mp, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(sites),
                                                               kLindbladDomain),
                                 cfg.n_traj, cfg.workers);
  const auto series =
      lindblad_evolve(DensityMatrix::pure(neel_state(basis)), *h, gamma, cfg.t_max, cfg.dt, cfg.sre_stride);
  if (series.size() != recs.front().times.size())
    throw std::logic_error("lindblad_check: trajectory and Lindblad sampling differ");

  LindbladCheckReport rep;
  rep.sites = sites;
  rep.gamma = gamma;
  rep.n_traj = cfg.n_traj;
  rep.low_power = cfg.n_traj < 100;
  std::vector<double> column(recs.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const RVector exact = sigma_z_expectations(series[k].rho);
    for (int l = 0; l < sites; ++l) {
      for (std::size_t i = 0; i < recs.size(); ++i) column[i] = recs[i].sz[k][static_cast<std::size_t>(l)];
      const MeanError me = mean_and_error(column);
      LindbladCheckRow row{series[k].t, l + 1, me.mean, me.std_error, exact[l], 0.0};
      const double diff = me.mean - exact[l];
      if (me.std_error > kDeterministicSpread) row.z = diff / me.std_error;
      else row.z = std::abs(diff) <= 1e-8 ? 0.0 : std::numeric_limits<double>::infinity();
      rep.max_abs_z = std::max(rep.max_abs_z, std::abs(row.z));
      rep.rows.push_back(row);
    }
  }
  rep.pass = rep.max_abs_z <= 4.0;
  return rep;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  CsvWriter w(path, {"model", "L", "gamma", "mean_sre", "stderr", "n_traj", "t0", "t1", "dt", "stationary", "status",
                     "message"});
  for (const auto& r : rows)
    w.row({std::string(to_string(r.model)), std::to_string(r.point.sites), d(r.point.gamma), d(r.point.mean),
           d(r.point.std_error), std::to_string(r.point.n_traj), d(r.point.t0), d(r.point.t1), d(r.dt),
           r.point.stationary ? "1" : "0", r.status, clean(r.message)});
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto models = t.strings("model");
  const auto L = t.numbers("L");
  const auto gamma = t.numbers("gamma");
  const auto mean = t.numbers("mean_sre");
  const auto err = t.numbers("stderr");
  const auto n = t.numbers("n_traj");
  const auto t0 = t.numbers("t0");
  const auto t1 = t.numbers("t1");
  const auto dt = t.numbers("dt");
  const auto stat = t.numbers("stationary");
  const auto status = t.strings("status");
  const auto message = t.strings("message");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    SweepRow r;
    r.model = parse_model(models[i]);
    r.point = {gamma[i], static_cast<int>(L[i]), mean[i], err[i], static_cast<int>(n[i]), t0[i], t1[i],
               stat[i] != 0.0, ""};
    r.dt = dt[i];
    r.status = status[i];
    r.message = message[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_fits_csv(std::span<const FitRow> rows, const std::filesystem::path& path) {
  CsvWriter w(path, {"L", "A", "A_err", "gamma0", "gamma0_err", "b", "b_err", "residual_rms", "converged", "model"});
  for (const auto& r : rows)
    w.row({std::to_string(r.sites), d(r.fit.A), d(r.fit.A_err()), d(r.fit.gamma0), d(r.fit.gamma0_err()), d(r.fit.b),
           d(r.fit.b_err()), d(r.fit.residual_rms), r.fit.converged ? "1" : "0", std::string(to_string(r.model))});
}

void write_slopes_csv(std::span<const SlopeRow> rows, const std::filesystem::path& path) {
  CsvWriter w(path, {"gamma", "slope", "slope_err", "intercept", "intercept_err", "n_sizes", "model"});
  for (const auto& r : rows)
    w.row({d(r.gamma), d(r.line.slope), d(r.line.slope_err), d(r.line.intercept), d(r.line.intercept_err),
           std::to_string(r.sizes), std::string(to_string(r.model))});
}

void write_trajectory(const TrajectoryRecord& rec, const json& meta, const std::filesystem::path& csv_path) {
  std::vector<std::string> header{"t", "sre"};
  const std::size_t L = rec.sz.empty() ? 0 : rec.sz.front().size();
  for (std::size_t l = 1; l <= L; ++l) header.push_back("sz_" + std::to_string(l));
  CsvWriter w(csv_path, header);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    std::vector<std::string> cells{d(rec.times[k]), k < rec.sre.size() ? d(rec.sre[k]) : "nan"};
    for (std::size_t l = 0; l < L; ++l) cells.push_back(d(rec.sz[k][l]));
    w.row(cells);
  }
  json side = meta;
  side["seed"] = rec.seed;
  side["norm_drift"] = rec.norm_drift;
  auto side_path = csv_path;
  side_path.replace_extension(".json");
  write_json(side_path, side);
}

std::vector<UnitaryRow> run_unitary(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.normalize();
  const Progress log(cfg.progress);
  json manifest = base_manifest(cfg, "unitary");
  json outputs = json::array();
  std::vector<UnitaryRow> rows;
  for (int L : cfg.sizes) {
    UnitaryRow row;
    row.point = unitary_point(cfg, L);
    row.phase = random_baseline(cfg, RandomStateKind::phase, L);
    row.haar = random_baseline(cfg, RandomStateKind::haar, L);
    log("unitary ", to_string(cfg.model), " L=", L, " mean=", row.point.mean, " +- ", row.point.std_error);

    const auto name = "unitary_" + std::string(to_string(cfg.model)) + "_L" + std::to_string(L) + ".csv";
    CsvWriter w(cfg.output_dir / name, {"t", "sre", "sre_err"});
    for (std::size_t k = 0; k < row.point.times.size(); ++k)
      w.row({d(row.point.times[k]), d(row.point.sre[k]), d(row.point.sre_err[k])});
    outputs.push_back(name);
    manifest["random_seeds"][std::to_string(L)] = {
        {"phase", random_seed(cfg.master_seed, RandomStateKind::phase, L)},
        {"haar", random_seed(cfg.master_seed, RandomStateKind::haar, L)}};
    rows.push_back(std::move(row));
  }
  CsvWriter s(cfg.output_dir / "unitary_summary.csv", {"model", "L", "mean_sre", "stderr", "realizations",
                                                       "phase_mean", "phase_stderr", "haar_mean", "haar_stderr",
                                                       "ln_NL"});
  for (const auto& r : rows)
    s.row({std::string(to_string(r.point.model)), std::to_string(r.point.sites), d(r.point.mean),
           d(r.point.std_error), std::to_string(r.point.realizations), d(r.phase.mean), d(r.phase.std_error),
           d(r.haar.mean), d(r.haar.std_error), d(std::log(static_cast<double>(binomial(r.point.sites,
                                                                                         r.point.sites / 2))))});
  outputs.push_back("unitary_summary.csv");
  manifest["outputs"] = outputs;
  write_json(cfg.output_dir / "manifest.json", manifest);
  return rows;
}

SweepReport run_sweep(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.normalize();
  if (cfg.gammas.empty()) throw std::invalid_argument("invalid config: sweep needs at least one gamma");
  const Progress log(cfg.progress);
  json manifest = base_manifest(cfg, "sweep");
  json schedule = json::array();
  for (double g : cfg.gammas) {
    try {
      const auto s = schedule_for(cfg, g);
      schedule.push_back({{"gamma", g}, {"dt", s.dt}, {"t0", s.t0}, {"t_max", s.t_max}, {"sre_stride", s.sre_stride}});
    } catch (const std::exception& e) {
      schedule.push_back({{"gamma", g}, {"error", e.what()}});
    }
  }
  manifest["schedule"] = schedule;
  json seeds = json::object();
  for (int L : cfg.sizes) {
    json per = json::array();
    for (std::size_t gi = 0; gi < cfg.gammas.size(); ++gi) per.push_back(point_seed(cfg.master_seed, L, gi));
    seeds[std::to_string(L)] = per;
  }
  manifest["point_seeds"] = seeds;

  SweepReport rep;
  const auto sweep_path = cfg.output_dir / "sweep.csv";
  for (int L : cfg.sizes) {
    std::optional<SizeContext> ctx;
    std::string setup_error;
    try {
      ctx = prepare_size(cfg, L);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (std::size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
      SweepRow row;
      row.model = cfg.model;
      row.point.gamma = cfg.gammas[gi];
      row.point.sites = L;
      try {
        if (!ctx) throw std::runtime_error(setup_error);
        row.dt = schedule_for(cfg, cfg.gammas[gi]).dt;
        std::vector<TrajectoryRecord> recs;
        row.point = run_point(cfg, *ctx, gi, cfg.save_trajectories > 0 ? &recs : nullptr);
        row.status = row.point.stationary ? "ok" : "nonstationary";
        row.message = row.point.warning;
        const auto keep = std::min<std::size_t>(recs.size(), static_cast<std::size_t>(cfg.save_trajectories));
        for (std::size_t i = 0; i < keep; ++i) {
          const json meta{{"model", to_string(cfg.model)}, {"L", L}, {"gamma", row.point.gamma}, {"dt", row.dt},
                          {"trajectory", i}, {"realization", i % ctx->props.size()},
                          {"J", cfg.J}, {"V", cfg.model == Model::xx ? 0.0 : cfg.V}, {"W", cfg.W},
                          {"stagger", to_string(cfg.stagger)}};
          std::ostringstream name;
          name << "trajectories/" << to_string(cfg.model) << "_L" << L << "_g" << gi << "_t" << i << ".csv";
          write_trajectory(recs[i], meta, cfg.output_dir / name.str());
        }
      } catch (const std::exception& e) {
        row.status = "failed";
        row.message = e.what();
      }
      log("sweep ", to_string(cfg.model), " L=", L, " gamma=", row.point.gamma, " mean=", row.point.mean, " +- ",
          row.point.std_error, " ", row.status);
      rep.rows.push_back(std::move(row));
      write_sweep_csv(rep.rows, sweep_path);
    }
  }
  json outputs = json::array({"sweep.csv"});
  if (cfg.fit) {
    rep.fits = fit_sweep(rep.rows, &rep.errors);
    write_fits_csv(rep.fits, cfg.output_dir / "fits.csv");
    outputs.push_back("fits.csv");
  }
  rep.slopes = slopes_vs_size(rep.rows);
  write_slopes_csv(rep.slopes, cfg.output_dir / "slopes.csv");
  outputs.push_back("slopes.csv");
  for (const auto& r : rep.rows)
    if (r.status == "failed")
      rep.errors.push_back(std::string(to_string(r.model)) + " L=" + std::to_string(r.point.sites) +
                           " gamma=" + format_double(r.point.gamma) + ": " + r.message);
  manifest["outputs"] = outputs;
  manifest["errors"] = rep.errors;
  write_json(cfg.output_dir / "manifest.json", manifest);
  return rep;
}

std::vector<RandomSreStats> run_random_states(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.normalize();
  const Progress log(cfg.progress);
  json manifest = base_manifest(cfg, "random-state");
  std::vector<RandomSreStats> out;
  CsvWriter w(cfg.output_dir / "random_states.csv", {"kind", "L", "samples", "mean_sre", "stderr", "ln_NL"});
  CsvWriter sl(cfg.output_dir / "random_slopes.csv",
               {"kind", "slope", "slope_err", "intercept", "intercept_err", "n_sizes"});
  for (auto kind : {RandomStateKind::phase, RandomStateKind::haar}) {
    std::vector<FitPoint> pts;
    for (int L : cfg.sizes) {
      const auto st = random_baseline(cfg, kind, L);
      log("random ", to_string(kind), " L=", L, " mean=", st.mean, " +- ", st.std_error);
      manifest["random_seeds"][std::string(to_string(kind))][std::to_string(L)] =
          random_seed(cfg.master_seed, kind, L);
      w.row({std::string(to_string(kind)), std::to_string(L), std::to_string(st.samples), d(st.mean),
             d(st.std_error), d(std::log(static_cast<double>(binomial(L, L / 2))))});
      pts.push_back({static_cast<double>(L), st.mean, st.std_error});
      out.push_back(st);
    }
    std::set<double> distinct;
    for (const auto& p : pts) distinct.insert(p.x);
    if (distinct.size() >= 3) {
      const auto line = fit_linear(pts);
      sl.row({std::string(to_string(kind)), d(line.slope), d(line.slope_err), d(line.intercept),
              d(line.intercept_err), std::to_string(pts.size())});
    }
  }
  manifest["outputs"] = {"random_states.csv", "random_slopes.csv"};
  write_json(cfg.output_dir / "manifest.json", manifest);
  return out;
}

std::vector<FitRow> run_fit(const std::filesystem::path& sweep_csv, const std::filesystem::path& output_dir) {
  const auto rows = read_sweep_csv(sweep_csv);
  std::vector<std::string> errors;
  auto fits = fit_sweep(rows, &errors);
  write_fits_csv(fits, output_dir / "fits.csv");
  json manifest;
  manifest["tool"] = "qmagic";
  manifest["version"] = kVersion;
  manifest["command"] = "fit";
  manifest["input"] = sweep_csv.string();
  manifest["outputs"] = {"fits.csv"};
  manifest["errors"] = errors;
  write_json(output_dir / "manifest.json", manifest);
  return fits;
}

std::vector<LindbladCheckReport> run_lindblad_check(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.normalize();
  if (cfg.sizes.size() != 1 || cfg.sizes.front() > 6)
    throw std::invalid_argument("invalid config: lindblad-check needs exactly one size L <= 6");
  if (cfg.gammas.empty()) throw std::invalid_argument("invalid config: lindblad-check needs at least one gamma");
  const Progress log(cfg.progress);
  const int L = cfg.sizes.front();
  std::vector<LindbladCheckReport> reports;
  CsvWriter w(cfg.output_dir / "lindblad_check.csv",
              {"gamma", "t", "site", "trajectory_mean", "trajectory_err", "lindblad", "z"});
  json summary = json::array();
  bool all_pass = true;
  for (double g : cfg.gammas) {
    auto rep = lindblad_check(cfg, L, g);
    for (const auto& r : rep.rows)
      w.row({d(g), d(r.t), std::to_string(r.site), d(r.trajectory_mean), d(r.trajectory_err), d(r.lindblad),
             d(r.z)});
    log("lindblad-check L=", L, " gamma=", g, " max|z|=", rep.max_abs_z, rep.pass ? " PASS" : " FAIL");
    summary.push_back({{"gamma", g},
                       {"max_abs_z", rep.max_abs_z},
                       {"verdict", rep.pass ? "PASS" : "FAIL"},
                       {"low_power", rep.low_power}});
    all_pass = all_pass && rep.pass;
    reports.push_back(std::move(rep));
  }
  json manifest = base_manifest(cfg, "lindblad-check");
  manifest["verdict"] = all_pass ? "PASS" : "FAIL";
  manifest["checks"] = summary;
  manifest["outputs"] = {"lindblad_check.csv"};
  write_json(cfg.output_dir / "manifest.json", manifest);
  return reports;
}

}  // namespace qmagic
