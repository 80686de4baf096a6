#include "tunnel/eigensolver.hpp"

#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "tunnel/csv.hpp"

namespace tunnel {

RealMatrix Tridiagonal::dense() const {
  const Eigen::Index n = size();
  RealMatrix h = diagonal.asDiagonal();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i, i + 1) = off_diagonal[i];
    h(i + 1, i) = off_diagonal[i];
  }
  return h;
}

Tridiagonal build_hamiltonian(const SpatialGrid& grid, const RealVector& potential,
                              const MassScale& mass) {
  if (potential.size() != grid.size()) {
    throw ValidationError("potential", "size does not match the grid");
  }
  const Real k = mass.hopping(grid);
  Tridiagonal h;
  h.diagonal = potential.array() + 2.0 * k;
  h.off_diagonal = RealVector::Constant(grid.size() - 1, -k);
  return h;
}

Tridiagonal build_hamiltonian(const SpatialGrid& grid, const DoubleWellParams& p,
                              const MassScale& mass) {
  return build_hamiltonian(grid, sample(grid, p), mass);
}

EigenBasis EigenBasis::truncated(Eigen::Index n) const {
  if (n < 1 || n > n_basis()) throw ValidationError("n_basis", "out of range");
  return {energies.head(n), states.leftCols(n), spacing};
}

RealVector eigenvalues(const Tridiagonal& h) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(h.diagonal, h.off_diagonal, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

Real max_residual(const Tridiagonal& h, const EigenBasis& basis) {
  Real worst = 0.0;
  for (Eigen::Index i = 0; i < basis.n_basis(); ++i) {
    const RealVector phi = basis.states.col(i);
    const RealVector r = h.apply(phi) - basis.energies[i] * phi;
    worst = std::max(worst, r.norm() / phi.norm());
  }
  return worst;
}

EigenBasis solve_eigenpairs(const Tridiagonal& h, Eigen::Index n_basis, Real spacing) {
  const Eigen::Index n = h.size();
  if (n_basis < 1 || n_basis > n) throw ValidationError("n_basis", "must be in [1, N]");
  if (!(spacing > 0.0)) throw ValidationError("spacing", "must be positive");

  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(h.diagonal, h.off_diagonal, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigen-iteration did not converge");
  }

  EigenBasis basis;
  basis.spacing = spacing;
  basis.energies = solver.eigenvalues().head(n_basis);
  basis.states = solver.eigenvectors().leftCols(n_basis) / std::sqrt(spacing);

  for (Eigen::Index i = 0; i < n_basis; ++i) {
    auto phi = basis.states.col(i);
    Eigen::Index peak = 0;
    phi.cwiseAbs().maxCoeff(&peak);
    if (phi[peak] < 0.0) phi = -phi;

    const RealVector r = h.apply(RealVector(phi)) - basis.energies[i] * phi;
    const Real scale = std::max<Real>(1.0, h.diagonal.cwiseAbs().maxCoeff());
    if (!(r.norm() / phi.norm() <= 1e-10 * scale)) {
      throw NumericalError("eigenpair " + std::to_string(i) + " failed the residual check");
    }
    if (i > 0 && !(basis.energies[i] > basis.energies[i - 1])) {
      throw NumericalError("eigenvalue " + std::to_string(i) + " is degenerate with its predecessor");
    }
  }
  return basis;
}

void write_eigen_csv(std::ostream& os, const SpatialGrid& grid, const RealVector& potential,
                     const EigenBasis& basis) {
  os << "# energies_cm1:";
  for (Eigen::Index i = 0; i < basis.n_basis(); ++i) os << ' ' << csv::number(basis.energies[i]);
  os << '\n';
  os << "zeta,V_cm1";
  for (Eigen::Index i = 0; i < basis.n_basis(); ++i) os << ",phi_" << i + 1;
  os << '\n';
  for (Eigen::Index n = 0; n < grid.size(); ++n) {
    os << csv::number(grid[n]) << ',' << csv::number(potential[n]);
    for (Eigen::Index i = 0; i < basis.n_basis(); ++i) os << ',' << csv::number(basis.states(n, i));
    os << '\n';
  }
}

}  // namespace tunnel
