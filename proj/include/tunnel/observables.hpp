#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tunnel/eigensolver.hpp"

namespace tunnel {

/// Time series written by both propagators.
struct Trajectory {
  std::vector<Real> times;  // ps
  std::vector<Real> p_shallow;
  std::vector<Real> trace_defect;
  std::vector<Real> hermiticity_defect;
  std::vector<std::optional<Real>> min_eigenvalue;
  std::vector<Real> energy;                   // cm^-1
  std::vector<RealVector> occupations;        // empty when not tracked
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }

  /// Index of the record at time t (within 1e-9 ps), or nullopt.
  std::optional<std::size_t> find(Real t) const;
};

/// Header lines (without the leading "# ") followed by the CSV body.
/// Columns: t_ps, p_shallow, trace_defect, hermiticity_defect, min_eigenvalue,
/// energy_expectation_cm1, then occ_1..occ_n when occupations were tracked.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& header);

/// Shallow-well projector in the eigenbasis,
/// Theta_ij = sum_{n shallow} phi_i(X_n) phi_j(X_n) dX.
RealMatrix shallow_projector(const EigenBasis& basis, const WellPartition& part);

/// Sum of rho_nn dX over the shallow side. `rho` is the grid density matrix.
Real shallow_probability_grid(const ComplexMatrix& rho, Real spacing, const WellPartition& part);

/// Tr(rho Theta) for an eigenbasis density matrix.
Real shallow_probability_eigen(const ComplexMatrix& rho, const RealMatrix& projector);

/// Diagonal of rho in the eigenbasis, projecting a grid density matrix first.
RealVector occupations_grid(const ComplexMatrix& rho, const EigenBasis& basis);
RealVector occupations_eigen(const ComplexMatrix& rho);

/// max |rho - rho^dagger|
Real hermiticity_defect(const ComplexMatrix& rho);

}  // namespace tunnel
