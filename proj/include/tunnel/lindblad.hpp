#pragma once

#include <optional>

#include "tunnel/bath.hpp"
#include "tunnel/pointer.hpp"

namespace tunnel {

/// Density matrix in the energy eigenbasis.
struct EigenDensityMatrix {
  ComplexMatrix rho;
  Real time = 0.0;  // ps

  Real trace() const { return rho.diagonal().real().sum(); }
};

/// rho_ij = sum_nm phi_i(X_n) rho_nm phi_j(X_m) dX^2. Components outside the
/// retained basis are dropped, not renormalised.
EigenDensityMatrix to_eigenbasis(const DensityMatrixGrid& state, const EigenBasis& basis);

EigenDensityMatrix eigenstate_density(Eigen::Index n_basis, Eigen::Index index);

/// Right-hand side of the eigenbasis master equation:
///   i != j:  d rho_ij/dt = (E_i - E_j) rho_ij / (i hbar) - rho_ij (G_i + G_j) / 2
///   i == j:  d rho_ii/dt = sum_{k != i} W_ik rho_kk - G_i rho_ii
/// with G_i = sum_{k != i} W_ki. Pass a null rate pointer for closed evolution.
ComplexMatrix master_rhs(const ComplexMatrix& rho, const RealVector& energies,
                         const RateMatrix* rates);

/// Integrator for the master equation. The coherent phase e^{-i w_ij dt} is
/// applied exactly and the dissipator is advanced with classical RK4; the two
/// parts commute, so this is RK4 in the interaction picture.
class LindbladPropagator {
 public:
  /// Closed evolution.
  explicit LindbladPropagator(RealVector energies);
  LindbladPropagator(RealVector energies, RateMatrix rates);

  Eigen::Index size() const { return energies_.size(); }
  const RealVector& energies() const { return energies_; }
  const std::optional<RateMatrix>& rates() const { return rates_; }

  /// Largest total out-rate, max_k |W_kk|.
  Real max_out_rate() const;

  /// Throws NumericalError when dt * max|W_kk| >= 0.1.
  void rk4_step(EigenDensityMatrix& state, Real dt) const;

 private:
  ComplexMatrix dissipator(const ComplexMatrix& rho) const;

  RealVector energies_;
  std::optional<RateMatrix> rates_;
  RealMatrix damping_;  // (G_i + G_j) / 2 off the diagonal
};

struct EigenProbe {
  RealMatrix projector;  // shallow-well projector in the same basis
};

Trajectory evolve(const EigenDensityMatrix& rho0, const LindbladPropagator& prop,
                  const IntegrationOptions& opts, const EigenProbe& probe);

}  // namespace tunnel
