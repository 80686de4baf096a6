#include "doctest.h"

#include <cmath>
#include <random>

#include "tunnel/pointer.hpp"

using namespace tunnel;

namespace {

struct Small {
  SpatialGrid grid{48, -2.2, 2.2};
  DoubleWellParams p{620.0, 63.6};
  GridHamiltonian h = GridHamiltonian::from(grid, p, MassScale());
  EigenBasis basis = solve_eigenpairs(h.tridiagonal(), 8, grid.spacing());
  WellPartition part = partition(grid, p);
};

ComplexMatrix random_hermitian(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  ComplexMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = Complex(d(rng), d(rng));
  return a + a.adjoint();
}

}  // namespace

TEST_CASE("measurement factor values") {
  CHECK(measurement_factor(128.0, 1e-4) == doctest::Approx(std::exp(-1.6384)).epsilon(1e-15));
  CHECK(measurement_factor(4.0, 1e-4) == doctest::Approx(std::exp(-0.0016)).epsilon(1e-15));
  CHECK(measurement_factor(7.0, 0.0) == 1.0);
}

TEST_CASE("measurement factor matrix") {
  MeasurementSchedule s{100.0, 1e-4, 0, false};
  const RealMatrix f = measurement_factors(8, s);
  CHECK(f(0, 3) == 1.0);
  CHECK(f(4, 7) == 1.0);
  CHECK(f(3, 4) == doctest::Approx(std::exp(-1e-4)));
  CHECK(f(0, 7) == doctest::Approx(std::exp(-49e-4)));
  CHECK((f - f.transpose()).cwiseAbs().maxCoeff() == 0.0);

  s.global = true;
  const RealMatrix g = measurement_factors(8, s);
  CHECK(g(0, 3) == doctest::Approx(std::exp(-9e-4)));
  CHECK(g(2, 2) == 1.0);

  s.global = false;
  s.block_size = 3;
  CHECK_THROWS_AS(measurement_factors(8, s), ValidationError);
}

TEST_CASE("measurement keeps diagonal blocks and the trace") {
  Small m;
  auto st = init_gaussian(m.grid, -1.0, 0.18);
  st.rho.array() += random_hermitian(48, 3).array() * 1e-3;
  const auto before = st;
  apply_measurement(st, MeasurementSchedule{100.0, 0.3, 0, false});
  CHECK(st.rho.topLeftCorner(24, 24) == before.rho.topLeftCorner(24, 24));
  CHECK(st.rho.bottomRightCorner(24, 24) == before.rho.bottomRightCorner(24, 24));
  CHECK(std::abs(st.trace() - before.trace()) <= 1e-15);
  CHECK(std::abs(st.rho(0, 47)) < std::abs(before.rho(0, 47)));
}

TEST_CASE("gaussian initial state") {
  Small m;
  const auto st = init_gaussian(m.grid, -1.0, 0.18);
  CHECK(st.trace() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hermiticity_defect(st.rho) == 0.0);
  CHECK_THROWS_AS(init_gaussian(m.grid, -1.0, 0.6), ValidationError);
  CHECK_THROWS_AS(init_gaussian(m.grid, -3.0, 0.1), ValidationError);
}

TEST_CASE("liouville rhs is traceless and anti-hermitian") {
  Small m;
  const ComplexMatrix rho = random_hermitian(48, 7);
  const ComplexMatrix d = liouville_rhs(rho, m.h);
  CHECK(std::abs(d.trace()) < 1e-9 * d.cwiseAbs().maxCoeff());
  CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * d.cwiseAbs().maxCoeff());
  // commutator with the tridiagonal H
  const RealMatrix h = m.h.tridiagonal().dense();
  const ComplexMatrix ref = (h.cast<Complex>() * rho - rho * h.cast<Complex>()) / Complex(0.0, units::kHbar);
  CHECK((d - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("stepper matches a reference RK4 built on liouville_rhs") {
  Small m;
  const ComplexMatrix rho = random_hermitian(48, 11);
  const double dt = 2e-4;
  auto f = [&](const ComplexMatrix& x) { return liouville_rhs(x, m.h); };
  const ComplexMatrix k1 = f(rho);
  const ComplexMatrix k2 = f(rho + 0.5 * dt * k1);
  const ComplexMatrix k3 = f(rho + 0.5 * dt * k2);
  const ComplexMatrix k4 = f(rho + dt * k3);
  const ComplexMatrix ref = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  DensityMatrixGrid st{rho, m.grid, 0.0};
  rk4_step(st, m.h, dt);
  CHECK((st.rho - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
  CHECK(st.time == dt);
}

TEST_CASE("eigenstate is stationary") {
  Small m;
  auto st = init_from_eigenstate(m.grid, m.basis, 0);
  const double p0 = shallow_probability_grid(st.rho, m.grid.spacing(), m.part);
  for (int i = 0; i < 200; ++i) rk4_step(st, m.h, 5e-5);
  CHECK(shallow_probability_grid(st.rho, m.grid.spacing(), m.part) == doctest::Approx(p0).epsilon(1e-12));
}

TEST_CASE("step counts for intervals") {
  std::vector<std::string> w;
  CHECK(steps_for_interval(0.01, 5e-5, "x", &w) == 200);
  CHECK(w.empty());
  CHECK(steps_for_interval(1.0 / 3300.0, 5e-5, "pointer.frequency", &w) == 6);
  CHECK(w.size() == 1);
  CHECK_THROWS_AS(steps_for_interval(1.0 / 30000.0, 5e-5, "x", &w), ValidationError);
  CHECK_THROWS_AS(steps_for_interval(1.0 / 15000.0, 5e-5, "x", &w), ValidationError);
}

TEST_CASE("first measurement happens at t = 1/f") {
  Small m;
  const auto rho0 = init_gaussian(m.grid, -1.0, 0.18);
  IntegrationOptions o{0.05, 5e-5, 0.01, 0};
  const GridProbe probe{m.part, std::nullopt};
  const auto closed = evolve_with_schedule(rho0, m.h, MeasurementSchedule{}, o, probe);
  const auto late = evolve_with_schedule(rho0, m.h, MeasurementSchedule{10.0, 1e-2, 0, false}, o, probe);
  const auto early = evolve_with_schedule(rho0, m.h, MeasurementSchedule{100.0, 1e-2, 0, false}, o, probe);
  CHECK(late.p_shallow == closed.p_shallow);
  CHECK(early.p_shallow[1] == closed.p_shallow[1]);  // first measurement at t = 0.01, after record
  CHECK(early.p_shallow.back() != closed.p_shallow.back());
}

TEST_CASE("trajectory under measurement keeps trace and hermiticity") {
  Small m;
  IntegrationOptions o{0.2, 5e-5, 0.02, 2};
  const auto t = evolve_with_schedule(init_gaussian(m.grid, -1.0, 0.18), m.h,
                                      MeasurementSchedule{500.0, 1e-3, 0, false}, o,
                                      GridProbe{m.part, m.basis});
  REQUIRE(t.size() == 11);
  for (std::size_t r = 0; r < t.size(); ++r) {
    CHECK(t.trace_defect[r] <= 1e-12);
    CHECK(t.hermiticity_defect[r] <= 1e-14);
    CHECK(t.min_eigenvalue[r].has_value() == (r % 2 == 0));
    CHECK(t.occupations[r].size() == 8);
  }
}

TEST_CASE("deterministic") {
  Small m;
  IntegrationOptions o{0.05, 5e-5, 0.01, 0};
  const MeasurementSchedule s{400.0, 1e-4, 0, false};
  const auto a = evolve_with_schedule(init_gaussian(m.grid, -1.0, 0.18), m.h, s, o, GridProbe{m.part, {}});
  const auto b = evolve_with_schedule(init_gaussian(m.grid, -1.0, 0.18), m.h, s, o, GridProbe{m.part, {}});
  CHECK(a.p_shallow == b.p_shallow);
  CHECK(a.energy == b.energy);
}
