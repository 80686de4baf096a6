#pragma once

#include <cmath>

#include "tunnel/grid.hpp"

namespace tunnel {

/// Asymmetric quartic double well
///   V(zeta) = B (1 - zeta^2)^2 + (dV / 2) zeta
/// with B the barrier height and dV the asymmetry, both in cm^-1.
/// A positive asymmetry makes the zeta < 0 well the deeper one.
struct DoubleWellParams {
  Real barrier = 620.0;
  Real asymmetry = 63.6;

  DoubleWellParams() = default;
  DoubleWellParams(Real b, Real dv) : barrier(b), asymmetry(dv) { validate(); }

  void validate() const {
    if (!(barrier > 0.0)) throw ValidationError("potential.barrier_cm1", "must be positive");
    if (!(std::abs(asymmetry) < barrier)) {
      throw ValidationError("potential.asymmetry_cm1", "|asymmetry| must be below the barrier");
    }
  }
};

template <typename Scalar>
Scalar evaluate(Scalar zeta, const DoubleWellParams& p) {
  const Scalar s = Scalar(1) - zeta * zeta;
  return Scalar(p.barrier) * s * s + Scalar(p.asymmetry) / Scalar(2) * zeta;
}

template <typename Scalar>
Scalar derivative(Scalar zeta, const DoubleWellParams& p) {
  return Scalar(-4) * Scalar(p.barrier) * zeta * (Scalar(1) - zeta * zeta) +
         Scalar(p.asymmetry) / Scalar(2);
}

/// Potential sampled on every grid point.
RealVector sample(const SpatialGrid& grid, const DoubleWellParams& p);

struct BarrierTop {
  Real zeta;
  Real value;
};

/// Interior local maximum of V in (-1, 1), located by bisection on dV/dzeta.
BarrierTop barrier_top(const DoubleWellParams& p);

/// Split of the grid at the barrier top zeta*. For a non-negative asymmetry the
/// deep well is zeta < zeta* and the shallow well zeta >= zeta*; otherwise the
/// sides are mirrored. Points exactly at zeta* belong to the shallow side.
struct WellPartition {
  Real divider;
  Eigen::Index split;  // first index of the right-hand side
  Eigen::Index n_points;
  bool deep_is_left = true;

  bool is_shallow(Eigen::Index n) const { return deep_is_left ? n >= split : n < split; }
};

WellPartition partition(const SpatialGrid& grid, const DoubleWellParams& p);

}  // namespace tunnel
