#include "tunnel/potential.hpp"

namespace tunnel {

RealVector sample(const SpatialGrid& grid, const DoubleWellParams& p) {
  RealVector v(grid.size());
  for (Eigen::Index n = 0; n < grid.size(); ++n) v[n] = evaluate(grid[n], p);
  return v;
}

BarrierTop barrier_top(const DoubleWellParams& p) {
  p.validate();
  // dV/dzeta = -4 B zeta (1 - zeta^2) + dV/2 is positive just left of the
  // maximum and negative just right of it. With |dV| < B the root lies
  // inside (-1/sqrt(3), 1/sqrt(3)), where dV/dzeta is monotone decreasing.
  Real lo = -1.0 / std::sqrt(3.0);
  Real hi = 1.0 / std::sqrt(3.0);
  Real f_lo = derivative(lo, p);
  Real f_hi = derivative(hi, p);
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw NumericalError("barrier_top: no sign change of dV/dzeta in (-1, 1)");
  }
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (derivative(mid, p) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const Real z = 0.5 * (lo + hi);
  return {z, evaluate(z, p)};
}

WellPartition partition(const SpatialGrid& grid, const DoubleWellParams& p) {
  const BarrierTop top = barrier_top(p);
  if (!(grid.zeta_min() < top.zeta && grid.zeta_max() >= top.zeta)) {
    throw ValidationError("grid", "does not straddle the barrier top");
  }
  const bool deep_left = p.asymmetry >= 0.0;
  Eigen::Index split = 0;
  if (deep_left) {
    while (split < grid.size() && grid[split] < top.zeta) ++split;
  } else {
    while (split < grid.size() && grid[split] <= top.zeta) ++split;
  }
  if (split == 0 || split == grid.size()) {
    throw ValidationError("grid", "does not straddle the barrier top");
  }
  return {top.zeta, split, grid.size(), deep_left};
}

}  // namespace tunnel
