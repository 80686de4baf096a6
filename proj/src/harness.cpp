#include "tunnel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include "tunnel/csv.hpp"

namespace tunnel {

Model Model::build(const RunConfig& cfg) {
  SpatialGrid grid(cfg.grid.n_points, cfg.grid.zeta_min, cfg.grid.zeta_max);
  GridHamiltonian h = GridHamiltonian::from(grid, cfg.potential, cfg.mass);
  EigenBasis basis = solve_eigenpairs(h.tridiagonal(), cfg.lindblad.n_basis, grid.spacing());
  WellPartition part = tunnel::partition(grid, cfg.potential);
  RealMatrix proj = shallow_projector(basis, part);
  return Model{std::move(grid), cfg.potential, cfg.mass, std::move(h), std::move(basis),
               std::move(part), std::move(proj)};
}

std::string version_string() { return TUNNEL_VERSION; }

std::vector<std::string> provenance(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("output");
  return {"tunnelsim " + version_string(), "config: " + j.dump()};
}

namespace {

DensityMatrixGrid initial_grid_state(const RunConfig& cfg, const Model& m) {
  if (cfg.initial.kind == InitialKind::kEigenstate) {
    return init_from_eigenstate(m.grid, m.basis, cfg.initial.index);
  }
  return init_gaussian(m.grid, cfg.initial.centre, cfg.initial.width);
}

EigenDensityMatrix initial_eigen_state(const RunConfig& cfg, const Model& m) {
  if (cfg.initial.kind == InitialKind::kEigenstate) {
    return eigenstate_density(m.basis.n_basis(), cfg.initial.index);
  }
  return to_eigenbasis(init_gaussian(m.grid, cfg.initial.centre, cfg.initial.width), m.basis);
}

LindbladPropagator make_propagator(const RunConfig& cfg, const Model& m) {
  if (cfg.lindblad.bath.temperature == 0.0) return LindbladPropagator(m.basis.energies);
  return LindbladPropagator(m.basis.energies, rate_matrix(m.basis, m.grid, cfg.lindblad.bath));
}

Trajectory run_grid(const RunConfig& cfg, const Model& m, const MeasurementSchedule& sched) {
  return evolve_with_schedule(initial_grid_state(cfg, m), m.hamiltonian, sched, grid_options(cfg),
                              GridProbe{m.partition, m.basis});
}

Trajectory run_eigen(const RunConfig& cfg, const Model& m, bool closed) {
  const LindbladPropagator prop = closed ? LindbladPropagator(m.basis.energies)
                                         : make_propagator(cfg, m);
  return evolve(initial_eigen_state(cfg, m), prop, eigen_options(cfg), EigenProbe{m.projector});
}

std::vector<std::string> header_with_warnings(const RunConfig& cfg, const Trajectory& t) {
  auto h = provenance(cfg);
  for (const auto& w : t.warnings) h.push_back("warning: " + w);
  return h;
}

}  // namespace

Trajectory run_trajectory(const RunConfig& cfg) {
  validate(cfg);
  return run_trajectory(cfg, Model::build(cfg));
}

Trajectory run_trajectory(const RunConfig& cfg, const Model& model) {
  switch (cfg.method) {
    case Method::kClosed:
      if (cfg.closed_basis == ClosedBasis::kEigen) return run_eigen(cfg, model, true);
      return run_grid(cfg, model, MeasurementSchedule{0.0, cfg.pointer.harshness, 0, false});
    case Method::kPointer:
      return run_grid(cfg, model, cfg.pointer);
    case Method::kLindblad:
      return run_eigen(cfg, model, false);
  }
  throw ValidationError("method", "unknown method");
}

void run(const RunConfig& cfg, std::ostream& os) {
  const Trajectory t = run_trajectory(cfg);
  write_trajectory_csv(os, t, header_with_warnings(cfg, t));
}

Comparison compare(const RunConfig& cfg) {
  validate(cfg);
  const Model m = Model::build(cfg);
  Comparison c;
  c.pointer = run_grid(cfg, m, cfg.pointer);
  c.lindblad = run_eigen(cfg, m, false);
  for (std::size_t r = 0; r < c.pointer.size(); ++r) {
    if (auto k = c.lindblad.find(c.pointer.times[r])) {
      c.max_abs_difference =
          std::max(c.max_abs_difference, std::abs(c.pointer.p_shallow[r] - c.lindblad.p_shallow[*k]));
    }
  }
  return c;
}

void write_comparison_csv(std::ostream& os, const Comparison& c, const RunConfig& cfg) {
  for (const auto& line : provenance(cfg)) os << "# " << line << '\n';
  for (const auto& w : c.pointer.warnings) os << "# warning: pointer: " << w << '\n';
  for (const auto& w : c.lindblad.warnings) os << "# warning: lindblad: " << w << '\n';
  os << "# max_abs_difference: " << csv::number(c.max_abs_difference) << '\n';
  os << "t_ps,p_shallow_pointer,p_shallow_lindblad,difference,energy_pointer_cm1,energy_lindblad_cm1\n";
  for (std::size_t r = 0; r < c.pointer.size(); ++r) {
    auto k = c.lindblad.find(c.pointer.times[r]);
    if (!k) continue;
    const Real pp = c.pointer.p_shallow[r];
    const Real pl = c.lindblad.p_shallow[*k];
    os << csv::number(c.pointer.times[r]) << ',' << csv::number(pp) << ',' << csv::number(pl) << ','
       << csv::number(pp - pl) << ',' << csv::number(c.pointer.energy[r]) << ','
       << csv::number(c.lindblad.energy[*k]) << '\n';
  }
}

unsigned default_workers() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TUNNEL_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ValidationError("TUNNEL_WORKERS", "must be a positive integer");
    }
    return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

namespace {

template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < k; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunConfig sweep_point(const SweepSpec& spec, const RunConfig& base, Real value) {
  RunConfig cfg = base;
  if (spec.axis == SweepAxis::kTemperature) {
    cfg.method = Method::kLindblad;
    cfg.lindblad.bath.temperature = value;
  } else {
    cfg.method = Method::kPointer;
    cfg.pointer.frequency = value;
  }
  cfg.integration.t_end = *std::max_element(spec.snapshots.begin(), spec.snapshots.end());
  return cfg;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, const RunConfig& base, unsigned workers) {
  spec.validate();
  validate(base);
  const Model model = Model::build(base);
  const std::size_t n = spec.values.size();
  std::vector<std::vector<Real>> results(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const RunConfig cfg = sweep_point(spec, base, spec.values[i]);
    validate(cfg);
    const Trajectory t = run_trajectory(cfg, model);
    for (Real s : spec.snapshots) {
      auto r = t.find(s);
      if (!r) throw ValidationError("sweep.snapshots", "snapshot is not on the record grid");
      results[i].push_back(t.p_shallow[*r]);
    }
  });
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < spec.snapshots.size(); ++s) {
      SweepRow row{spec.values[i], spec.snapshots[s], results[i][s], std::nullopt};
      if (i > 0) row.first_difference = results[i][s] - results[i - 1][s];
      rows.push_back(row);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, const SweepSpec& spec,
                     const RunConfig& base) {
  for (const auto& line : provenance(base)) os << "# " << line << '\n';
  os << "# sweep: axis=" << to_string(spec.axis) << " values=";
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    os << (i ? ";" : "") << csv::number(spec.values[i]);
  }
  os << " snapshots_ps=";
  for (std::size_t i = 0; i < spec.snapshots.size(); ++i) {
    os << (i ? ";" : "") << csv::number(spec.snapshots[i]);
  }
  os << '\n';
  os << (spec.axis == SweepAxis::kTemperature ? "temperature_k" : "frequency_per_ps")
     << ",snapshot_ps,p_shallow,first_difference\n";
  for (const auto& r : rows) {
    os << csv::number(r.axis_value) << ',' << csv::number(r.snapshot) << ','
       << csv::number(r.p_shallow) << ',';
    if (r.first_difference) os << csv::number(*r.first_difference);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

Real deep_minimum(const DoubleWellParams& p, bool deep_is_left) {
  const Real s = 1.0 / std::sqrt(3.0);
  Real lo = deep_is_left ? -2.0 : s;
  Real hi = deep_is_left ? -s : 2.0;
  // V' < 0 at lo, > 0 at hi
  for (;;) {
    const Real mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (derivative(mid, p) < 0.0 ? lo : hi) = mid;
  }
  return evaluate(0.5 * (lo + hi), p);
}

}  // namespace

LengthCalibration level_structure(const RunConfig& cfg) {
  const SpatialGrid grid(cfg.grid.n_points, cfg.grid.zeta_min, cfg.grid.zeta_max);
  const RealVector e = eigenvalues(build_hamiltonian(grid, cfg.potential, cfg.mass));
  const Real vtop = barrier_top(cfg.potential).value;
  const Real vdeep = deep_minimum(cfg.potential, cfg.potential.asymmetry >= 0.0);
  LengthCalibration out;
  out.length_angstrom = cfg.mass.length_m / units::kAngstrom;
  out.sub_barrier_states = static_cast<int>((e.array() < vtop).count());
  out.fourth_gap_fraction = e.size() >= 4 ? (vtop - e(3)) / (vtop - vdeep)
                                          : std::numeric_limits<Real>::quiet_NaN();
  out.feasible = out.sub_barrier_states == 4 && out.fourth_gap_fraction <= 0.1;
  return out;
}

LengthCalibration calibrate_length(const RunConfig& base, Real lo, Real hi, Real step) {
  if (!(lo > 0.0 && hi > lo)) throw ValidationError("calibrate.length_range", "need 0 < lo < hi");
  if (!(step > 0.0)) throw ValidationError("calibrate.length_step", "must be positive");
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  long first = -1, last = -1;
  for (long i = 0; i <= n; ++i) {
    RunConfig cfg = base;
    cfg.mass.length_m = (lo + Real(i) * step) * units::kAngstrom;
    const LengthCalibration c = level_structure(cfg);
    if (c.feasible) {
      if (first < 0) first = i;
      last = i;
    } else if (first >= 0) {
      break;
    }
  }
  if (first < 0) {
    LengthCalibration none = level_structure(base);
    none.feasible = false;
    return none;
  }
  RunConfig cfg = base;
  const Real lmid = lo + 0.5 * Real(first + last) * step;
  cfg.mass.length_m = lmid * units::kAngstrom;
  LengthCalibration out = level_structure(cfg);
  out.length_angstrom = lmid;
  out.band_lo = lo + Real(first) * step;
  out.band_hi = lo + Real(last) * step;
  return out;
}

std::vector<Real> lindblad_snapshots(const RunConfig& cfg, const Model& model,
                                     const std::vector<Real>& times) {
  IntegrationOptions opts = eigen_options(cfg);
  opts.t_end = *std::max_element(times.begin(), times.end());
  const Trajectory t = evolve(eigenstate_density(model.basis.n_basis(), 0),
                              make_propagator(cfg, model), opts, EigenProbe{model.projector});
  std::vector<Real> out;
  for (Real s : times) {
    auto r = t.find(s);
    if (!r) throw ValidationError("integration.record_every", "snapshot is not on the record grid");
    out.push_back(t.p_shallow[*r]);
  }
  return out;
}

BathCalibration calibrate_bath(const RunConfig& base, const BathSearch& search) {
  std::vector<Real> dvr = search.rearrangement_energies;
  if (dvr.empty()) {
    for (int k = -20; k <= 30; ++k) dvr.push_back(std::pow(10.0, Real(k) / 10.0));
  }
  if (search.phonon_frequencies.empty()) {
    throw ValidationError("calibrate.phonon_frequencies", "must not be empty");
  }
  const Real centre = 0.5 * (search.band.lo + search.band.hi);
  const Model model = Model::build(base);

  struct Candidate {
    BathCalibration cal;
    bool ok = false;
  };
  const std::size_t nw = search.phonon_frequencies.size();
  std::vector<Candidate> cands(nw * dvr.size());
  parallel_for(cands.size(), default_workers(), [&](std::size_t i) {
    RunConfig cfg = base;
    cfg.method = Method::kLindblad;
    cfg.lindblad.bath = {200.0, search.phonon_frequencies[i / dvr.size()], dvr[i % dvr.size()]};
    cfg.integration.record_every = 1.0;
    BathCalibration& c = cands[i].cal;
    c.band = search.band;
    c.phonon_frequency = cfg.lindblad.bath.phonon_frequency;
    c.rearrangement_energy = cfg.lindblad.bath.rearrangement_energy;
    std::vector<Real> p;
    try {
      p = lindblad_snapshots(cfg, model, {10.0, 99.0, 100.0});
    } catch (const NumericalError&) {
      return;  // stability guard: rates too fast for the eigenbasis step
    }
    c.p_shallow_10ps = p[0];
    c.plateau_slope = std::abs(p[2] - p[1]);
    c.band_residual = std::max({0.0, search.band.lo - p[0], p[0] - search.band.hi});
    c.feasible = c.band_residual == 0.0 && c.plateau_slope <= 1e-4;
    cands[i].ok = true;
  });

  // order: omega_p outer, dV_R inner, so the first best is the lowest pair
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!c.ok) continue;
    auto score = [&](const BathCalibration& b) {
      return std::make_tuple(!b.feasible, b.feasible ? std::abs(b.p_shallow_10ps - centre)
                                                     : b.band_residual);
    };
    if (!best || score(c.cal) < score(best->cal)) best = &c;
  }
  if (!best) {
    BathCalibration none;
    none.band = search.band;
    none.band_residual = std::numeric_limits<Real>::infinity();
    return none;
  }
  return best->cal;
}

// ---------------------------------------------------------------------------

Real step_doubling_ratio(Real coarse, Real mid, Real fine) { return (coarse - mid) / (mid - fine); }

namespace {

RunConfig selftest_config() {
  RunConfig cfg = default_config();
  cfg.grid.n_points = 48;
  cfg.lindblad.n_basis = 16;
  cfg.integration.t_end = 0.2;
  cfg.integration.record_every = 0.01;
  return cfg;
}

CheckResult check(std::string name, bool ok, std::string detail) {
  return CheckResult{std::move(name), ok, std::move(detail)};
}

std::string fmt(Real v) { return csv::number(v); }

Real max_of(const std::vector<Real>& v) {
  Real m = 0.0;
  for (Real x : v) m = std::isfinite(x) ? std::max(m, std::abs(x)) : std::numeric_limits<Real>::infinity();
  return m;
}

Real grid_p_end(const RunConfig& cfg, const Model& m, Real dt) {
  IntegrationOptions o = grid_options(cfg);
  o.dt = dt;
  o.record_every = o.t_end;
  const Trajectory t = evolve_with_schedule(init_gaussian(m.grid, cfg.initial.centre, cfg.initial.width),
                                            m.hamiltonian, MeasurementSchedule{}, o,
                                            GridProbe{m.partition, std::nullopt});
  return t.p_shallow.back();
}

}  // namespace

std::vector<CheckResult> selftest(Fault fault) {
  std::vector<CheckResult> out;
  RunConfig cfg = selftest_config();
  const Model m = Model::build(cfg);
  const Real dt_scale = fault == Fault::kCoarsePointerStep ? 50.0 : 1.0;

  // trace and hermiticity under measurement
  {
    RunConfig c = cfg;
    c.method = Method::kPointer;
    c.pointer.frequency = 100.0;
    c.integration.dt *= dt_scale;
    bool ok = true;
    std::string detail;
    try {
      const Trajectory t = run_trajectory(c, m);
      const Real tr = max_of(t.trace_defect), he = max_of(t.hermiticity_defect);
      ok = tr <= 1e-8 && he <= 1e-10;
      detail = "trace " + fmt(tr) + ", hermiticity " + fmt(he);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(check("pointer trace and hermiticity", ok, detail));
  }

  // rates
  RateMatrix w = rate_matrix(m.basis, m.grid, cfg.lindblad.bath);
  if (fault == Fault::kNegateRate) w.rates(1, 0) = -w.rates(1, 0);
  {
    const Real v = detailed_balance_violation(w, m.basis.energies, cfg.lindblad.bath.temperature);
    out.push_back(check("detailed balance", v <= 1e-12, "max violation " + fmt(v)));
  }
  {
    Eigen::JacobiSVD<RealMatrix> svd(w.rates, Eigen::ComputeFullV);
    RealVector null = svd.matrixV().col(w.size() - 1);
    null /= null.sum();
    const RealVector pi = boltzmann_distribution(m.basis.energies, cfg.lindblad.bath.temperature);
    const Real d = (null - pi).cwiseAbs().maxCoeff();
    const Real cols = w.rates.colwise().sum().cwiseAbs().maxCoeff();
    out.push_back(check("boltzmann stationarity", d <= 1e-6 && cols <= 1e-12,
                        "max |null - boltzmann| " + fmt(d) + ", column sums " + fmt(cols)));
  }
  {
    RunConfig c = cfg;
    c.method = Method::kLindblad;
    c.integration.t_end = 5.0;
    c.integration.record_every = 0.1;
    bool ok = true;
    std::string detail;
    try {
      const Trajectory t = evolve(eigenstate_density(m.basis.n_basis(), 0),
                                  LindbladPropagator(m.basis.energies, w), eigen_options(c),
                                  EigenProbe{m.projector});
      const Real tr = max_of(t.trace_defect);
      Real neg = 0.0;
      for (const auto& occ : t.occupations) neg = std::min(neg, occ.minCoeff());
      ok = tr <= 1e-10 && neg >= -1e-12;
      detail = "trace " + fmt(tr) + ", min occupation " + fmt(neg);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(check("lindblad trace and positivity", ok, detail));
  }

  // cross-basis oracle: full basis, closed evolution
  {
    RunConfig c = cfg;
    c.lindblad.n_basis = c.grid.n_points;
    const Model full = Model::build(c);
    c.method = Method::kClosed;
    c.integration.dt *= dt_scale;
    bool ok = true;
    std::string detail;
    try {
      const Trajectory g = run_trajectory(c, full);
      c.closed_basis = ClosedBasis::kEigen;
      const Trajectory e = run_trajectory(c, full);
      Real d = 0.0;
      for (std::size_t r = 0; r < g.size(); ++r) {
        auto k = e.find(g.times[r]);
        if (!k) continue;
        const Real x = std::abs(g.p_shallow[r] - e.p_shallow[*k]);
        d = std::isfinite(x) ? std::max(d, x) : std::numeric_limits<Real>::infinity();
      }
      ok = d <= 1e-8;
      detail = "max |dP| " + fmt(d);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(check("cross-basis oracle", ok, detail));
  }

  // step doubling
  {
    RunConfig c = cfg;
    c.integration.t_end = 0.1;
    const Real dt = 4e-4 * dt_scale;
    bool ok = true;
    std::string detail;
    try {
      const Real pc = grid_p_end(c, m, dt), pm = grid_p_end(c, m, dt / 2), pf = grid_p_end(c, m, dt / 4);
      const Real r = step_doubling_ratio(pc, pm, pf);
      ok = r >= 8.0 && r <= 32.0;
      detail = "ratio " + fmt(r);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(check("pointer step doubling", ok, detail));
  }
  {
    RunConfig c = cfg;
    c.integration.t_end = 1.0;
    c.integration.record_every = 1.0;
    auto p_at = [&](Real dt) {
      IntegrationOptions o = eigen_options(c);
      o.dt = dt;
      const Trajectory t = evolve(eigenstate_density(m.basis.n_basis(), 0),
                                  LindbladPropagator(m.basis.energies, w), o,
                                  EigenProbe{m.projector});
      return t.p_shallow.back();
    };
    bool ok = true;
    std::string detail;
    try {
      const Real dt = 1.0 / std::ceil(w.rates.diagonal().cwiseAbs().maxCoeff() / 0.08);
      const Real r = step_doubling_ratio(p_at(dt), p_at(dt / 2), p_at(dt / 4));
      ok = r >= 8.0 && r <= 32.0;
      detail = "ratio " + fmt(r);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    out.push_back(check("lindblad step doubling", ok, detail));
  }
  return out;
}

}  // namespace tunnel
