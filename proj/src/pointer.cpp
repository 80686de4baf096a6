#include "tunnel/pointer.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace tunnel {

GridHamiltonian GridHamiltonian::from(const SpatialGrid& grid, const DoubleWellParams& p,
                                      const MassScale& mass) {
  return {sample(grid, p), mass.hopping(grid)};
}

Tridiagonal GridHamiltonian::tridiagonal() const {
  Tridiagonal t;
  t.diagonal = potential.array() + 2.0 * hopping;
  t.off_diagonal = RealVector::Constant(potential.size() - 1, -hopping);
  return t;
}

DensityMatrixGrid init_gaussian(const SpatialGrid& grid, Real centre, Real width) {
  if (!(width > 0.0)) throw ValidationError("initial.width", "must be positive");
  if (!(centre > grid.zeta_min() && centre < grid.zeta_max())) {
    throw ValidationError("initial.centre", "lies outside the grid");
  }
  // Mass of |psi|^2 beyond the grid edges, Gaussian tails with std `width`.
  const Real tail = 0.5 * std::erfc((centre - grid.zeta_min()) / (width * std::sqrt(2.0))) +
                    0.5 * std::erfc((grid.zeta_max() - centre) / (width * std::sqrt(2.0)));
  if (tail > 1e-10) throw ValidationError("initial.width", "Gaussian leaks off the grid");

  RealVector psi(grid.size());
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    const Real d = grid[n] - centre;
    psi[n] = std::exp(-d * d / (4.0 * width * width));
  }
  psi /= std::sqrt(psi.squaredNorm() * grid.spacing());
  return {(psi * psi.transpose()).cast<Complex>(), grid, 0.0};
}

DensityMatrixGrid init_from_eigenstate(const SpatialGrid& grid, const EigenBasis& basis,
                                       Eigen::Index index) {
  if (index < 0 || index >= basis.n_basis()) {
    throw ValidationError("initial.index", "eigenstate index out of range");
  }
  if (basis.n_points() != grid.size()) throw ValidationError("initial", "basis/grid mismatch");
  const RealVector phi = basis.states.col(index);
  return {(phi * phi.transpose()).cast<Complex>(), grid, 0.0};
}

ComplexMatrix liouville_rhs(const ComplexMatrix& rho, const GridHamiltonian& h) {
  const Eigen::Index n = rho.rows();
  const Real k = h.hopping;
  ComplexMatrix out(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex lap = 0.0;
      if (i > 0) lap += rho(i - 1, m);
      if (i + 1 < n) lap += rho(i + 1, m);
      if (m > 0) lap -= rho(i, m - 1);
      if (m + 1 < n) lap -= rho(i, m + 1);
      const Complex bracket = -k * lap + (h.potential[i] - h.potential[m]) * rho(i, m);
      out(i, m) = bracket / Complex(0.0, units::kHbar);
    }
  }
  return out;
}

void rk4_step(DensityMatrixGrid& state, const GridHamiltonian& h, Real dt) {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
  GridStepper stepper(h);
  stepper.load(state.rho);
  stepper.step(dt);
  stepper.store(state.rho);
  state.time += dt;
}

RealMatrix measurement_factors(Eigen::Index n, const MeasurementSchedule& sched) {
  const Eigen::Index block = sched.resolved_block(n);
  if (block < 1 || n % block != 0) {
    throw ValidationError("pointer.block_size", "must divide the number of grid points");
  }
  if (!(sched.harshness >= 0.0)) throw ValidationError("pointer.harshness", "must be >= 0");
  RealMatrix f(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool same_block = i / block == m / block;
      f(i, m) = (same_block && !sched.global)
                    ? 1.0
                    : measurement_factor(Real(i - m), sched.harshness);
    }
  }
  return f;
}

void apply_measurement(DensityMatrixGrid& state, const MeasurementSchedule& sched) {
  state.rho.array() *= measurement_factors(state.rho.rows(), sched).array().cast<Complex>();
}

long steps_for_interval(Real interval, Real dt, const char* field,
                        std::vector<std::string>* warnings) {
  const Real ratio = interval / dt;
  const long steps = std::lround(ratio);
  if (steps < 1) throw ValidationError(field, "interval is shorter than the integration step");
  const Real rel = std::abs(Real(steps) - ratio) / ratio;
  if (rel > 0.1) {
    throw ValidationError(field, "interval is incommensurate with the integration step");
  }
  if (rel > 1e-9 && warnings) {
    std::ostringstream os;
    os << field << ": interval " << interval << " ps rounded to " << steps << " steps ("
       << Real(steps) * dt << " ps)";
    warnings->push_back(os.str());
  }
  return steps;
}

namespace {

void record(Trajectory& traj, const DensityMatrixGrid& s, const Tridiagonal& h,
            const GridProbe& probe, bool sample_eigen) {
  const Real dx = s.grid.spacing();
  traj.times.push_back(s.time);
  traj.p_shallow.push_back(shallow_probability_grid(s.rho, dx, probe.partition));
  traj.trace_defect.push_back(std::abs(s.trace() - 1.0));
  traj.hermiticity_defect.push_back(hermiticity_defect(s.rho));
  if (sample_eigen) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s.rho * dx, Eigen::EigenvaluesOnly);
    traj.min_eigenvalue.emplace_back(es.eigenvalues().minCoeff());
  } else {
    traj.min_eigenvalue.emplace_back();
  }
  // Tr(rho H) dX with the tridiagonal Hamiltonian.
  const Eigen::Index n = s.rho.rows();
  Real e = (h.diagonal.array() * s.rho.diagonal().real().array()).sum();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    e += h.off_diagonal[i] * (s.rho(i, i + 1).real() + s.rho(i + 1, i).real());
  }
  traj.energy.push_back(e * dx);
  if (probe.basis) traj.occupations.push_back(occupations_grid(s.rho, *probe.basis));
}

}  // namespace

Trajectory evolve_with_schedule(const DensityMatrixGrid& rho0, const GridHamiltonian& h,
                                const MeasurementSchedule& sched,
                                const IntegrationOptions& opts, const GridProbe& probe) {
  if (!(opts.dt > 0.0)) throw ValidationError("integration.dt", "must be positive");
  if (!(opts.t_end > 0.0)) throw ValidationError("integration.t_end", "must be positive");
  if (!(opts.record_every > 0.0)) {
    throw ValidationError("integration.record_every", "must be positive");
  }
  if (!(sched.frequency >= 0.0)) throw ValidationError("pointer.frequency", "must be >= 0");
  if (rho0.rho.rows() != h.potential.size()) {
    throw ValidationError("initial", "density matrix does not match the Hamiltonian");
  }
  if (probe.partition.n_points != rho0.grid.size()) {
    throw ValidationError("partition", "built on a different grid");
  }

  Trajectory traj;
  const long n_steps = steps_for_interval(opts.t_end, opts.dt, "integration.t_end", &traj.warnings);
  const long record_steps =
      steps_for_interval(opts.record_every, opts.dt, "integration.record_every", &traj.warnings);

  long measure_steps = 0;
  RealMatrix factors;
  if (sched.frequency > 0.0 && 1.0 / sched.frequency <= opts.t_end) {
    if (1.0 / sched.frequency < opts.dt) {
      throw ValidationError("pointer.frequency", "measurement interval is shorter than dt");
    }
    measure_steps = steps_for_interval(1.0 / sched.frequency, opts.dt, "pointer.frequency",
                                       &traj.warnings);
    factors = measurement_factors(rho0.rho.rows(), sched);
  }

  const Tridiagonal ht = h.tridiagonal();
  DensityMatrixGrid state = rho0;
  GridStepper stepper(h);
  stepper.load(state.rho);

  long n_records = 0;
  auto take = [&] {
    const bool eig = opts.min_eigenvalue_every > 0 && n_records % opts.min_eigenvalue_every == 0;
    record(traj, state, ht, probe, eig);
    ++n_records;
  };
  take();

  for (long step = 1; step <= n_steps; ++step) {
    stepper.step(opts.dt);
    if (measure_steps > 0 && step % measure_steps == 0) stepper.scale(factors);
    if (step % record_steps == 0 || step == n_steps) {
      state.time = Real(step) * opts.dt;
      stepper.store(state.rho);
      take();
      stepper.hermitize();
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

GridStepper::GridStepper(const GridHamiltonian& h)
    : n_(h.potential.size()), ld_(h.potential.size() + 2), hopping_(h.hopping) {
  vpad_ = RealVector::Zero(ld_);
  vpad_.segment(1, n_) = h.potential;
  const Eigen::Index sz = ld_ * ld_;
  for (RealVector* v : {&yr_, &yi_, &ar_, &ai_, &s1r_, &s1i_, &s2r_, &s2i_, &s3r_, &s3i_}) {
    *v = RealVector::Zero(sz);
  }
}

void GridStepper::load(const ComplexMatrix& rho) {
  if (rho.rows() != n_ || rho.cols() != n_) throw ValidationError("rho", "dimension mismatch");
  for (Eigen::Index j = 0; j < n_; ++j) {
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Eigen::Index idx = (j + 1) * ld_ + i + 1;
      yr_[idx] = rho(i, j).real();
      yi_[idx] = rho(i, j).imag();
    }
  }
}

void GridStepper::store(ComplexMatrix& rho) const {
  rho.resize(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) {
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Eigen::Index idx = (j + 1) * ld_ + i + 1;
      rho(i, j) = Complex(yr_[idx], yi_[idx]);
    }
  }
}

void GridStepper::scale(const RealMatrix& factors) {
  for (Eigen::Index j = 0; j < n_; ++j) {
    const Real* f = factors.col(j).data();
    Real* __restrict r = yr_.data() + (j + 1) * ld_ + 1;
    Real* __restrict im = yi_.data() + (j + 1) * ld_ + 1;
    for (Eigen::Index i = 0; i < n_; ++i) {
      r[i] *= f[i];
      im[i] *= f[i];
    }
  }
}

void GridStepper::hermitize() {
  for (Eigen::Index j = 1; j <= n_; ++j) {
    for (Eigen::Index i = j; i <= n_; ++i) {
      const Eigen::Index a = j * ld_ + i;
      const Eigen::Index b = i * ld_ + j;
      const Real re = 0.5 * (yr_[a] + yr_[b]);
      const Real im = 0.5 * (yi_[a] - yi_[b]);
      yr_[a] = re;
      yr_[b] = re;
      yi_[a] = im;
      yi_[b] = -im;
    }
  }
}

namespace {

enum class StageKind { kFirst, kMiddle, kLast };

// One column of a fused RK4 stage: k = L(s); acc (+)= w k; out = y + c k.
// The last stage writes acc + w k to `out` instead.
template <StageKind S>
void stage_column(Eigen::Index n, Real k, Real inv_hbar, Real vj, const Real* __restrict v,
                  const Real* __restrict cr, const Real* __restrict ci,
                  const Real* __restrict lr, const Real* __restrict li,
                  const Real* __restrict rr, const Real* __restrict ri,
                  const Real* __restrict y_r, const Real* __restrict y_i,
                  Real* __restrict a_r, Real* __restrict a_i,
                  Real* __restrict o_r, Real* __restrict o_i, Real w, Real c) {
#pragma GCC ivdep
  for (Eigen::Index i = 1; i <= n; ++i) {
    const Real dv = v[i] - vj;
    const Real br = dv * cr[i] - k * (cr[i - 1] + cr[i + 1] - lr[i] - rr[i]);
    const Real bi = dv * ci[i] - k * (ci[i - 1] + ci[i + 1] - li[i] - ri[i]);
    // d rho / dt = bracket / (i hbar)
    const Real kr = bi * inv_hbar;
    const Real ki = -br * inv_hbar;
    if constexpr (S == StageKind::kFirst) {
      a_r[i] = y_r[i] + w * kr;
      a_i[i] = y_i[i] + w * ki;
    } else if constexpr (S == StageKind::kMiddle) {
      a_r[i] += w * kr;
      a_i[i] += w * ki;
    }
    if constexpr (S == StageKind::kLast) {
      o_r[i] = a_r[i] + w * kr;
      o_i[i] = a_i[i] + w * ki;
    } else {
      o_r[i] = y_r[i] + c * kr;
      o_i[i] = y_i[i] + c * ki;
    }
  }
}

}  // namespace

template <GridStepper::Stage S>
void GridStepper::stage(Eigen::Index j, const Real* sr, const Real* si, Real w, Real c,
                        Real* outr, Real* outi) {
  constexpr StageKind kind = S == Stage::kFirst    ? StageKind::kFirst
                             : S == Stage::kMiddle ? StageKind::kMiddle
                                                   : StageKind::kLast;
  const Real* v = vpad_.data();
  const Eigen::Index off = j * ld_;
  stage_column<kind>(n_, hopping_, 1.0 / units::kHbar, v[j], v, sr + off, si + off,
                     sr + off - ld_, si + off - ld_, sr + off + ld_, si + off + ld_,
                     yr_.data() + off, yi_.data() + off, ar_.data() + off, ai_.data() + off,
                     outr + off, outi + off, w, c);
}

// The four RK4 stages run as a wavefront over columns: stage s at column
// t + 4 - s. Stage s only needs columns t + 3 - s .. t + 5 - s of the previous
// stage, all of which are complete, and column t of y is no longer read once
// the last stage overwrites it. Keeps the active columns in L1.
void GridStepper::step(Real dt) {
  for (Eigen::Index t = -2; t <= n_; ++t) {
    if (t + 3 >= 1 && t + 3 <= n_) {
      stage<Stage::kFirst>(t + 3, yr_.data(), yi_.data(), dt / 6.0, dt / 2.0, s1r_.data(),
                           s1i_.data());
    }
    if (t + 2 >= 1 && t + 2 <= n_) {
      stage<Stage::kMiddle>(t + 2, s1r_.data(), s1i_.data(), dt / 3.0, dt / 2.0, s2r_.data(),
                            s2i_.data());
    }
    if (t + 1 >= 1 && t + 1 <= n_) {
      stage<Stage::kMiddle>(t + 1, s2r_.data(), s2i_.data(), dt / 3.0, dt, s3r_.data(),
                            s3i_.data());
    }
    if (t >= 1) {
      stage<Stage::kLast>(t, s3r_.data(), s3i_.data(), dt / 6.0, 0.0, yr_.data(), yi_.data());
    }
  }
}

}  // namespace tunnel
