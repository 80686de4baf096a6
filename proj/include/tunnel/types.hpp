#pragma once

#include <complex>

#include <Eigen/Core>

namespace tunnel {

using Real = double;
using Complex = std::complex<Real>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<Real>;
using ComplexMatrix = Matrix<Complex>;
using RealVector = Vector<Real>;
using ComplexVector = Vector<Complex>;

}  // namespace tunnel
