#include "tunnel/observables.hpp"

#include <cmath>
#include <ostream>

#include "tunnel/csv.hpp"

namespace tunnel {

std::optional<std::size_t> Trajectory::find(Real t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t) <= 1e-9) return i;
  }
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& header) {
  for (const auto& line : header) os << "# " << line << '\n';
  const std::size_t n_occ = traj.occupations.empty() ? 0 : traj.occupations.front().size();
  os << "t_ps,p_shallow,trace_defect,hermiticity_defect,min_eigenvalue,energy_expectation_cm1";
  for (std::size_t i = 0; i < n_occ; ++i) os << ",occ_" << i + 1;
  os << '\n';
  for (std::size_t r = 0; r < traj.size(); ++r) {
    os << csv::number(traj.times[r]) << ',' << csv::number(traj.p_shallow[r]) << ','
       << csv::number(traj.trace_defect[r]) << ',' << csv::number(traj.hermiticity_defect[r])
       << ',';
    if (traj.min_eigenvalue[r]) os << csv::number(*traj.min_eigenvalue[r]);
    os << ',' << csv::number(traj.energy[r]);
    for (std::size_t i = 0; i < n_occ; ++i) os << ',' << csv::number(traj.occupations[r][i]);
    os << '\n';
  }
}

RealMatrix shallow_projector(const EigenBasis& basis, const WellPartition& part) {
  if (part.n_points != basis.n_points()) throw ValidationError("partition", "basis/grid mismatch");
  RealMatrix masked = basis.states;
  for (Eigen::Index n = 0; n < masked.rows(); ++n) {
    if (!part.is_shallow(n)) masked.row(n).setZero();
  }
  RealMatrix theta = basis.states.transpose() * masked * basis.spacing;
  return 0.5 * (theta + theta.transpose());
}

Real shallow_probability_grid(const ComplexMatrix& rho, Real spacing, const WellPartition& part) {
  if (rho.rows() != part.n_points) throw ValidationError("partition", "partition/grid mismatch");
  Complex sum = 0.0;
  for (Eigen::Index n = 0; n < rho.rows(); ++n) {
    if (part.is_shallow(n)) sum += rho(n, n);
  }
  sum *= spacing;
  if (!(std::abs(sum.imag()) < 1e-12)) {
    throw NumericalError("shallow probability has a non-zero imaginary part");
  }
  return sum.real();
}

Real shallow_probability_eigen(const ComplexMatrix& rho, const RealMatrix& projector) {
  if (rho.rows() != projector.rows()) throw ValidationError("projector", "dimension mismatch");
  // Tr(rho Theta) with Theta real symmetric.
  return (rho.real().array() * projector.array()).sum();
}

RealVector occupations_grid(const ComplexMatrix& rho, const EigenBasis& basis) {
  if (rho.rows() != basis.n_points()) throw ValidationError("basis", "dimension mismatch");
  const ComplexMatrix rphi = rho * basis.states.cast<Complex>();
  RealVector occ(basis.n_basis());
  const Real w = basis.spacing * basis.spacing;
  for (Eigen::Index i = 0; i < basis.n_basis(); ++i) {
    occ[i] = (basis.states.col(i).cast<Complex>().dot(rphi.col(i))).real() * w;
  }
  return occ;
}

RealVector occupations_eigen(const ComplexMatrix& rho) { return rho.diagonal().real(); }

Real hermiticity_defect(const ComplexMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace tunnel
