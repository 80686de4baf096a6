#pragma once

// Internal unit system: energy in cm^-1, time in ps, temperature in K.
// Angular frequencies are in rad/ps; hbar is expressed in cm^-1 ps so that
// E / hbar is an angular frequency.

#include <numbers>

#include "tunnel/error.hpp"

namespace tunnel::units {

// CODATA 2018 (exact or recommended values).
inline constexpr double kSpeedOfLightSI = 2.99792458e8;           // m/s
inline constexpr double kPlanckSI = 6.62607015e-34;               // J s
inline constexpr double kHbarSI = 1.054571817e-34;                // J s
inline constexpr double kBoltzmannSI = 1.380649e-23;              // J/K
inline constexpr double kProtonMassKg = 1.67262192369e-27;        // kg
inline constexpr double kAngstrom = 1e-10;                        // m

/// Speed of light in cm/ps.
inline constexpr double kSpeedOfLight = 2.99792458e-2;

/// Boltzmann constant in cm^-1 / K.
inline constexpr double kBoltzmann = 0.6950348004;

/// hbar in cm^-1 ps, i.e. 1 / (2 pi c).
inline constexpr double kHbar = 1.0 / (2.0 * std::numbers::pi * kSpeedOfLight);

/// One cm^-1 expressed in joules (h c with c in cm/s).
inline constexpr double kWavenumberJoule = kPlanckSI * kSpeedOfLightSI * 100.0;

template <typename Scalar>
constexpr Scalar wavenumber_to_angular_frequency(Scalar wavenumber) {
  return Scalar(2) * Scalar(std::numbers::pi) * Scalar(kSpeedOfLight) * wavenumber;
}

template <typename Scalar>
constexpr Scalar angular_frequency_to_wavenumber(Scalar omega) {
  return omega / (Scalar(2) * Scalar(std::numbers::pi) * Scalar(kSpeedOfLight));
}

/// k_B T in cm^-1.
inline double thermal_energy(double temperature) {
  if (!(temperature >= 0.0)) {
    throw ValidationError("temperature", "must be non-negative");
  }
  return kBoltzmann * temperature;
}

/// hbar^2 / (2 m L^2) in cm^-1 for a particle of mass `mass_kg` on a
/// coordinate whose unit corresponds to `length_m` metres.
inline double kinetic_energy_scale(double mass_kg, double length_m) {
  return kHbarSI * kHbarSI / (2.0 * mass_kg * length_m * length_m) / kWavenumberJoule;
}

}  // namespace tunnel::units
