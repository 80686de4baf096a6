#pragma once

#include <iosfwd>

#include "tunnel/potential.hpp"
#include "tunnel/units.hpp"

namespace tunnel {

/// Mass of the tunnelling particle and the physical length of one unit of zeta.
struct MassScale {
  Real mass_kg = units::kProtonMassKg;
  Real length_m = 0.9525 * units::kAngstrom;

  MassScale() = default;
  MassScale(Real mass, Real length) : mass_kg(mass), length_m(length) { validate(); }

  void validate() const {
    if (!(mass_kg > 0.0)) throw ValidationError("mass.mass_kg", "must be positive");
    if (!(length_m > 0.0)) throw ValidationError("mass.length_scale_angstrom", "must be positive");
  }

  /// hbar^2 / (2 m L^2) in cm^-1.
  Real kinetic_energy_scale() const { return units::kinetic_energy_scale(mass_kg, length_m); }

  /// Nearest-neighbour hopping hbar^2 / (2 m dX_phys^2) of the three-point
  /// Laplacian on `grid`, in cm^-1.
  Real hopping(const SpatialGrid& grid) const {
    return kinetic_energy_scale() / (grid.spacing() * grid.spacing());
  }
};

/// Real symmetric tridiagonal matrix.
struct Tridiagonal {
  RealVector diagonal;
  RealVector off_diagonal;  // size n - 1

  Eigen::Index size() const { return diagonal.size(); }

  /// y = H x
  template <typename Derived>
  auto apply(const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = size();
    Vector<Scalar> y = diagonal.cast<Scalar>().cwiseProduct(x);
    y.head(n - 1) += off_diagonal.cast<Scalar>().cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += off_diagonal.cast<Scalar>().cwiseProduct(x.head(n - 1));
    return y;
  }

  RealMatrix dense() const;
};

/// Three-point finite-difference Hamiltonian: diagonal 2K + V_n, off-diagonal
/// -K with K = hbar^2 / (2 m dX_phys^2). Dirichlet closure at the grid edges.
Tridiagonal build_hamiltonian(const SpatialGrid& grid, const RealVector& potential,
                              const MassScale& mass);
Tridiagonal build_hamiltonian(const SpatialGrid& grid, const DoubleWellParams& p,
                              const MassScale& mass);

/// Lowest eigenpairs of the grid Hamiltonian. States are real, normalised with
/// the grid weight (sum phi_i^2 dX = 1), and signed so that the entry of
/// largest magnitude is positive.
struct EigenBasis {
  RealVector energies;  // ascending, cm^-1
  RealMatrix states;    // n_points x n_basis
  Real spacing = 0.0;

  Eigen::Index n_basis() const { return energies.size(); }
  Eigen::Index n_points() const { return states.rows(); }

  /// The same basis restricted to its lowest `n` states.
  EigenBasis truncated(Eigen::Index n) const;
};

EigenBasis solve_eigenpairs(const Tridiagonal& h, Eigen::Index n_basis, Real spacing);

/// All eigenvalues of a symmetric tridiagonal matrix, ascending.
RealVector eigenvalues(const Tridiagonal& h);

/// Max over retained states of ||H phi_i - E_i phi_i|| / ||phi_i||.
Real max_residual(const Tridiagonal& h, const EigenBasis& basis);

/// CSV: one row per grid point with columns zeta, V, phi_1..phi_n. The
/// energies go in a leading comment line.
void write_eigen_csv(std::ostream& os, const SpatialGrid& grid, const RealVector& potential,
                     const EigenBasis& basis);

}  // namespace tunnel
