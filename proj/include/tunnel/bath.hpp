#pragma once

#include <cmath>
#include <iosfwd>
#include <numbers>

#include "tunnel/eigensolver.hpp"

namespace tunnel {

/// Harmonic heat bath: temperature (K), characteristic phonon frequency
/// (rad/ps) and rearrangement energy (cm^-1).
struct BathParams {
  Real temperature = 200.0;
  Real phonon_frequency = 80.0;
  Real rearrangement_energy = 10.0;

  void validate() const {
    if (!(temperature >= 0.0)) throw ValidationError("lindblad.temperature_k", "must be >= 0");
    if (!(phonon_frequency > 0.0)) throw ValidationError("lindblad.phonon_frequency_rad_per_ps", "must be > 0");
    if (!(rearrangement_energy >= 0.0)) {
      throw ValidationError("lindblad.rearrangement_energy_cm1", "must be >= 0");
    }
  }
};

/// Power spectral density of the bath displacement
///   J(w) = 4 sqrt(2) dV_R hbar w_p w^3 / ((w_p^4 + w^4) (exp(hbar w / k_B T) - 1))
/// in cm^-2 ps. Continuous through w = 0 where it vanishes; positive for w != 0.
/// Requires T > 0.
template <typename Scalar>
Scalar spectral_density(Scalar omega, const BathParams& bath) {
  using std::expm1;
  if (omega == Scalar(0)) return Scalar(0);
  const Scalar hbar = Scalar(1) / (Scalar(2) * Scalar(std::numbers::pi) * Scalar(units::kSpeedOfLight));
  const Scalar kt = Scalar(units::kBoltzmann) * Scalar(bath.temperature);
  const Scalar wp = Scalar(bath.phonon_frequency);
  const Scalar w2 = omega * omega;
  const Scalar wp2 = wp * wp;
  const Scalar num = Scalar(4) * std::numbers::sqrt2_v<Scalar> * Scalar(bath.rearrangement_energy) *
                     hbar * wp * w2 * omega;
  return num / ((wp2 * wp2 + w2 * w2) * expm1(hbar * omega / kt));
}

/// q2_jk = (sum_n phi_j(X_n) zeta_n phi_k(X_n) dX)^2
RealMatrix coupling_matrix(const EigenBasis& basis, const SpatialGrid& grid);

/// Generator of the eigenstate-population Markov process. rates(j, k) is the
/// rate of k -> j in ps^-1; the diagonal holds minus the total out-rate.
struct RateMatrix {
  RealMatrix rates;

  Eigen::Index size() const { return rates.rows(); }
  /// Total rate out of state k, sum_{j != k} W_jk.
  RealVector out_rates() const;
};

/// W_jk = (2 pi / hbar^2) q2_jk J(w_jk), w_jk = (E_j - E_k) / hbar, diagonal
/// closed so that columns sum to zero.
RateMatrix rate_matrix(const EigenBasis& basis, const SpatialGrid& grid, const BathParams& bath);
RateMatrix rate_matrix(const RealVector& energies, const RealMatrix& coupling,
                       const BathParams& bath);

/// Normalised pi_i ~ exp(-E_i / k_B T).
RealVector boltzmann_distribution(const RealVector& energies, Real temperature);

/// max over j != k with both rates positive of
/// |W_jk / W_kj / exp(-(E_j - E_k) / k_B T) - 1|; negative entries count as
/// violations of size 1 or larger.
Real detailed_balance_violation(const RateMatrix& w, const RealVector& energies, Real temperature);

void write_rate_csv(std::ostream& os, const RateMatrix& w);

}  // namespace tunnel
