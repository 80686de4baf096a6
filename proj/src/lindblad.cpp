#include "tunnel/lindblad.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace tunnel {

EigenDensityMatrix to_eigenbasis(const DensityMatrixGrid& state, const EigenBasis& basis) {
  if (state.rho.rows() != basis.n_points()) throw ValidationError("basis", "dimension mismatch");
  const ComplexMatrix phi = basis.states.cast<Complex>();
  const Real w = basis.spacing * basis.spacing;
  ComplexMatrix rho = phi.transpose() * state.rho * phi * w;
  return {0.5 * (rho + rho.adjoint()), state.time};
}

EigenDensityMatrix eigenstate_density(Eigen::Index n_basis, Eigen::Index index) {
  if (index < 0 || index >= n_basis) throw ValidationError("initial.index", "out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(n_basis, n_basis);
  rho(index, index) = 1.0;
  return {rho, 0.0};
}

ComplexMatrix master_rhs(const ComplexMatrix& rho, const RealVector& energies,
                         const RateMatrix* rates) {
  const Eigen::Index n = energies.size();
  if (rho.rows() != n || rho.cols() != n) throw ValidationError("rho", "dimension mismatch");
  if (rates && rates->size() != n) throw ValidationError("rates", "dimension mismatch");
  ComplexMatrix out(n, n);
  const Complex inv_ihbar = 1.0 / Complex(0.0, units::kHbar);
  const RealVector out_rate = rates ? rates->out_rates() : RealVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) {
        out(i, j) = (energies[i] - energies[j]) * rho(i, j) * inv_ihbar -
                    0.5 * (out_rate[i] + out_rate[j]) * rho(i, j);
      } else {
        Complex gain = 0.0;
        if (rates) {
          for (Eigen::Index k = 0; k < n; ++k) {
            if (k != i) gain += rates->rates(i, k) * rho(k, k);
          }
        }
        out(i, i) = gain - out_rate[i] * rho(i, i);
      }
    }
  }
  return out;
}

LindbladPropagator::LindbladPropagator(RealVector energies) : energies_(std::move(energies)) {}

LindbladPropagator::LindbladPropagator(RealVector energies, RateMatrix rates)
    : energies_(std::move(energies)), rates_(std::move(rates)) {
  const Eigen::Index n = energies_.size();
  if (rates_->size() != n) throw ValidationError("rates", "dimension mismatch");
  const RealVector g = rates_->out_rates();
  damping_ = 0.5 * (g.replicate(1, n) + g.transpose().replicate(n, 1));
  damping_.diagonal().setZero();
}

Real LindbladPropagator::max_out_rate() const {
  return rates_ ? rates_->rates.diagonal().cwiseAbs().maxCoeff() : 0.0;
}

ComplexMatrix LindbladPropagator::dissipator(const ComplexMatrix& rho) const {
  ComplexMatrix d = -(damping_.cast<Complex>().array() * rho.array()).matrix();
  d.diagonal() = (rates_->rates * rho.diagonal().real()).cast<Complex>();
  return d;
}

void LindbladPropagator::rk4_step(EigenDensityMatrix& state, Real dt) const {
  if (!(dt > 0.0)) throw ValidationError("dt", "must be positive");
  if (state.rho.rows() != size()) throw ValidationError("rho", "dimension mismatch");
  if (rates_) {
    if (!(dt * max_out_rate() < 0.1)) {
      std::ostringstream os;
      os << "stability guard: dt * max|W_kk| = " << dt * max_out_rate() << " >= 0.1";
      throw NumericalError(os.str());
    }
    const ComplexMatrix& y = state.rho;
    const ComplexMatrix k1 = dissipator(y);
    const ComplexMatrix k2 = dissipator(y + 0.5 * dt * k1);
    const ComplexMatrix k3 = dissipator(y + 0.5 * dt * k2);
    const ComplexMatrix k4 = dissipator(y + dt * k3);
    state.rho = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Eigen::Index n = size();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const Real phase = -(energies_[i] - energies_[j]) / units::kHbar * dt;
      state.rho(i, j) *= Complex(std::cos(phase), std::sin(phase));
    }
  }
  state.time += dt;
}

namespace {

void record(Trajectory& traj, const EigenDensityMatrix& s, const RealVector& energies,
            const EigenProbe& probe, bool sample_eigen) {
  traj.times.push_back(s.time);
  traj.p_shallow.push_back(shallow_probability_eigen(s.rho, probe.projector));
  traj.trace_defect.push_back(std::abs(s.trace() - 1.0));
  traj.hermiticity_defect.push_back(hermiticity_defect(s.rho));
  if (sample_eigen) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s.rho, Eigen::EigenvaluesOnly);
    traj.min_eigenvalue.emplace_back(es.eigenvalues().minCoeff());
  } else {
    traj.min_eigenvalue.emplace_back();
  }
  const RealVector occ = occupations_eigen(s.rho);
  traj.energy.push_back(energies.dot(occ));
  traj.occupations.push_back(occ);
}

}  // namespace

Trajectory evolve(const EigenDensityMatrix& rho0, const LindbladPropagator& prop,
                  const IntegrationOptions& opts, const EigenProbe& probe) {
  if (!(opts.dt > 0.0)) throw ValidationError("integration.dt", "must be positive");
  if (!(opts.t_end > 0.0)) throw ValidationError("integration.t_end", "must be positive");
  if (!(opts.record_every > 0.0)) {
    throw ValidationError("integration.record_every", "must be positive");
  }
  if (rho0.rho.rows() != prop.size() || probe.projector.rows() != prop.size()) {
    throw ValidationError("lindblad.n_basis", "state, propagator and projector sizes differ");
  }
  Trajectory traj;
  const long n_steps = steps_for_interval(opts.t_end, opts.dt, "integration.t_end", &traj.warnings);
  const long record_steps =
      steps_for_interval(opts.record_every, opts.dt, "integration.record_every", &traj.warnings);

  EigenDensityMatrix state = rho0;
  long n_records = 0;
  auto take = [&] {
    const bool eig = opts.min_eigenvalue_every > 0 && n_records % opts.min_eigenvalue_every == 0;
    record(traj, state, prop.energies(), probe, eig);
    ++n_records;
  };
  take();
  for (long step = 1; step <= n_steps; ++step) {
    prop.rk4_step(state, opts.dt);
    if (step % record_steps == 0 || step == n_steps) {
      state.time = Real(step) * opts.dt;
      take();
    }
  }
  return traj;
}

}  // namespace tunnel
