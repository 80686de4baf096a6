#pragma once

#include <optional>

#include "tunnel/observables.hpp"

namespace tunnel {

/// Position-basis density matrix rho_nm = <X_n| rho |X_m>, normalised so that
/// Tr(rho) dX = 1.
struct DensityMatrixGrid {
  ComplexMatrix rho;
  SpatialGrid grid;
  Real time = 0.0;  // ps

  Real trace() const { return rho.diagonal().real().sum() * grid.spacing(); }
};

/// Parameters of the grid Liouvillian: sampled potential and the hopping
/// K = hbar^2 / (2 m dX_phys^2), both in cm^-1.
struct GridHamiltonian {
  RealVector potential;
  Real hopping = 0.0;

  GridHamiltonian() = default;
  GridHamiltonian(RealVector v, Real k) : potential(std::move(v)), hopping(k) {}
  static GridHamiltonian from(const SpatialGrid& grid, const DoubleWellParams& p,
                              const MassScale& mass);

  Tridiagonal tridiagonal() const;
};

/// Pure state of a Gaussian wave packet psi ~ exp(-(zeta - centre)^2 / (4 width^2)),
/// so `width` is the standard deviation of |psi|^2.
DensityMatrixGrid init_gaussian(const SpatialGrid& grid, Real centre, Real width);

DensityMatrixGrid init_from_eigenstate(const SpatialGrid& grid, const EigenBasis& basis,
                                       Eigen::Index index);

/// d rho / dt of the closed grid Liouville equation with Dirichlet closure.
ComplexMatrix liouville_rhs(const ComplexMatrix& rho, const GridHamiltonian& h);

/// Allocating single RK4 step; evolve_with_schedule reuses a GridStepper instead.
void rk4_step(DensityMatrixGrid& state, const GridHamiltonian& h, Real dt);

/// Periodic "pointer" measurement. Elements whose indices fall in different
/// diagonal blocks of size `block_size` are multiplied by exp(-y (n - m)^2).
/// With `global` set the factor is applied to every element instead.
struct MeasurementSchedule {
  Real frequency = 0.0;  // ps^-1; zero disables measurement
  Real harshness = 1e-4;
  Eigen::Index block_size = 0;  // zero selects N / 2
  bool global = false;

  Eigen::Index resolved_block(Eigen::Index n) const { return block_size == 0 ? n / 2 : block_size; }
};

template <typename Scalar>
Scalar measurement_factor(Scalar index_distance, Scalar harshness) {
  using std::exp;
  return exp(-harshness * index_distance * index_distance);
}

/// Factor matrix applied by one measurement (1 inside diagonal blocks).
RealMatrix measurement_factors(Eigen::Index n, const MeasurementSchedule& sched);

void apply_measurement(DensityMatrixGrid& state, const MeasurementSchedule& sched);

struct IntegrationOptions {
  Real t_end = 3.0;            // ps
  Real dt = 5e-5;              // ps
  Real record_every = 0.01;    // ps
  int min_eigenvalue_every = 0;  // records between positivity diagnostics; 0 disables
};

/// What to measure at each record.
struct GridProbe {
  WellPartition partition;
  std::optional<EigenBasis> basis;  // enables occupation columns
};

/// Alternates RK4 steps with measurements every 1/f (first at t = 1/f) and
/// records observables every `record_every`. Deterministic.
Trajectory evolve_with_schedule(const DensityMatrixGrid& rho0, const GridHamiltonian& h,
                                const MeasurementSchedule& sched,
                                const IntegrationOptions& opts, const GridProbe& probe);

/// Number of integration steps covering `interval`, rounding to the nearest
/// integer. Throws when the interval is shorter than one step or the rounding
/// error exceeds 10 %; otherwise a rounding warning is appended to `warnings`.
long steps_for_interval(Real interval, Real dt, const char* field,
                        std::vector<std::string>* warnings);

/// In-place RK4 integrator for the grid Liouvillian. Keeps the real and
/// imaginary parts in separate zero-padded arrays so the three-point stencil
/// needs no boundary branches.
class GridStepper {
 public:
  explicit GridStepper(const GridHamiltonian& h);

  void load(const ComplexMatrix& rho);
  void store(ComplexMatrix& rho) const;

  void step(Real dt);
  void scale(const RealMatrix& factors);
  void hermitize();

 private:
  enum class Stage { kFirst, kMiddle, kLast };
  template <Stage S>
  void stage(Eigen::Index column, const Real* sr, const Real* si, Real w, Real c, Real* outr,
             Real* outi);

  Eigen::Index n_;
  Eigen::Index ld_;
  Real hopping_;
  RealVector vpad_;
  RealVector yr_, yi_, ar_, ai_, s1r_, s1i_, s2r_, s2i_, s3r_, s3i_;
};

}  // namespace tunnel
