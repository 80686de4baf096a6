#pragma once

#include <cstddef>

#include "tunnel/error.hpp"
#include "tunnel/types.hpp"

namespace tunnel {

/// Uniform grid on the dimensionless transfer coordinate zeta.
class SpatialGrid {
 public:
  SpatialGrid(Eigen::Index n_points, Real zeta_min, Real zeta_max)
      : n_(n_points), lo_(zeta_min), hi_(zeta_max) {
    if (n_points < 3) throw ValidationError("grid.n_points", "must be at least 3");
    if (!(zeta_max > zeta_min)) throw ValidationError("grid.zeta_max", "must exceed zeta_min");
    spacing_ = (hi_ - lo_) / Real(n_ - 1);
  }

  Eigen::Index size() const { return n_; }
  Real zeta_min() const { return lo_; }
  Real zeta_max() const { return hi_; }
  Real spacing() const { return spacing_; }

  Real operator[](Eigen::Index n) const { return lo_ + Real(n) * spacing_; }

  RealVector points() const {
    RealVector z(n_);
    for (Eigen::Index n = 0; n < n_; ++n) z[n] = (*this)[n];
    return z;
  }

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.n_ == b.n_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Eigen::Index n_;
  Real lo_;
  Real hi_;
  Real spacing_;
};

}  // namespace tunnel
