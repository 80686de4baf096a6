#include "doctest.h"

#include "tunnel/potential.hpp"

using namespace tunnel;

TEST_CASE("double well values") {
  const DoubleWellParams p(620.0, 63.6);
  CHECK(evaluate(0.0, p) == 620.0);
  CHECK(evaluate(1.0, p) == doctest::Approx(31.8));
  CHECK(evaluate(-1.0, p) == doctest::Approx(-31.8));
  CHECK(evaluate(0.5f, p) == doctest::Approx(evaluate(0.5, p)).epsilon(1e-6));
}

TEST_CASE("derivative matches finite difference") {
  const DoubleWellParams p(620.0, 63.6);
  for (double z : {-1.7, -0.3, 0.0, 0.41, 1.2}) {
    const double h = 1e-6;
    const double fd = (evaluate(z + h, p) - evaluate(z - h, p)) / (2 * h);
    CHECK(derivative(z, p) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("barrier top") {
  const auto top = barrier_top(DoubleWellParams(620.0, 63.6));
  CHECK(top.zeta == doctest::Approx(0.012824689956192016).epsilon(1e-12));
  CHECK(top.value == doctest::Approx(620.20389579852226).epsilon(1e-13));
  const auto sym = barrier_top(DoubleWellParams(620.0, 0.0));
  CHECK(std::abs(sym.zeta) < 1e-15);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(DoubleWellParams(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(DoubleWellParams(10.0, 20.0), ValidationError);
}

TEST_CASE("partition splits at the barrier top") {
  const SpatialGrid g(128, -2.2, 2.2);
  const DoubleWellParams p(620.0, 63.6);
  const auto part = partition(g, p);
  CHECK(part.deep_is_left);
  CHECK(g[part.split] >= part.divider);
  CHECK(g[part.split - 1] < part.divider);
  CHECK_FALSE(part.is_shallow(0));
  CHECK(part.is_shallow(127));

  const auto mirrored = partition(g, DoubleWellParams(620.0, -63.6));
  CHECK_FALSE(mirrored.deep_is_left);
  CHECK(mirrored.is_shallow(0));
}

TEST_CASE("tie at the divider goes to the shallow side") {
  // zeta* = 0 for the symmetric well; an odd grid has a point at 0
  const SpatialGrid g(5, -2.0, 2.0);
  const auto part = partition(g, DoubleWellParams(620.0, 0.0));
  CHECK(part.is_shallow(2));
  CHECK_FALSE(part.is_shallow(1));
}

TEST_CASE("grid must straddle the barrier") {
  const SpatialGrid g(16, -2.0, -0.5);
  CHECK_THROWS_AS(partition(g, DoubleWellParams(620.0, 63.6)), ValidationError);
}
