#include "tunnel/bath.hpp"

#include <ostream>

#include "tunnel/csv.hpp"

namespace tunnel {

RealMatrix coupling_matrix(const EigenBasis& basis, const SpatialGrid& grid) {
  if (grid.size() != basis.n_points()) throw ValidationError("basis", "basis/grid mismatch");
  const RealMatrix weighted = grid.points().asDiagonal() * basis.states;
  RealMatrix q = basis.states.transpose() * weighted * basis.spacing;
  q = (0.5 * (q + q.transpose())).eval();
  return q.cwiseAbs2();
}

RealVector RateMatrix::out_rates() const { return -rates.diagonal(); }

RateMatrix rate_matrix(const RealVector& energies, const RealMatrix& coupling,
                       const BathParams& bath) {
  bath.validate();
  const Eigen::Index n = energies.size();
  if (!(bath.temperature > 0.0)) throw ValidationError("lindblad.temperature_k", "must be > 0");
  if (n < 2) throw ValidationError("lindblad.n_basis", "must be at least 2");
  if (coupling.rows() != n || coupling.cols() != n) {
    throw ValidationError("coupling", "dimension mismatch");
  }
  const Real prefactor = 2.0 * std::numbers::pi / (units::kHbar * units::kHbar);
  RateMatrix w{RealMatrix::Zero(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == k) continue;
      const Real omega = (energies[j] - energies[k]) / units::kHbar;
      w.rates(j, k) = prefactor * coupling(j, k) * spectral_density(omega, bath);
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    Real out = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != k) out += w.rates(j, k);
    }
    w.rates(k, k) = -out;
  }
  return w;
}

RateMatrix rate_matrix(const EigenBasis& basis, const SpatialGrid& grid, const BathParams& bath) {
  return rate_matrix(basis.energies, coupling_matrix(basis, grid), bath);
}

RealVector boltzmann_distribution(const RealVector& energies, Real temperature) {
  const Real kt = units::thermal_energy(temperature);
  if (!(kt > 0.0)) throw ValidationError("temperature", "must be > 0");
  const Real e0 = energies.minCoeff();
  RealVector p = (-(energies.array() - e0) / kt).exp();
  return p / p.sum();
}

Real detailed_balance_violation(const RateMatrix& w, const RealVector& energies, Real temperature) {
  const Real kt = units::thermal_energy(temperature);
  Real worst = 0.0;
  const Eigen::Index n = w.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == k) continue;
      const Real a = w.rates(j, k);
      const Real b = w.rates(k, j);
      if (a < 0.0 || b < 0.0) {
        worst = std::max(worst, 1.0 + std::abs(a) + std::abs(b));
        continue;
      }
      if (a == 0.0 || b == 0.0) continue;
      const Real expected = std::exp(-(energies[j] - energies[k]) / kt);
      worst = std::max(worst, std::abs(a / b / expected - 1.0));
    }
  }
  return worst;
}

void write_rate_csv(std::ostream& os, const RateMatrix& w) {
  os << "W";
  for (Eigen::Index k = 0; k < w.size(); ++k) os << ',' << k + 1;
  os << '\n';
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    os << j + 1;
    for (Eigen::Index k = 0; k < w.size(); ++k) os << ',' << csv::number(w.rates(j, k));
    os << '\n';
  }
}

}  // namespace tunnel
