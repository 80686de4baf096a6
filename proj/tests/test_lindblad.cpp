#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "tunnel/lindblad.hpp"

using namespace tunnel;

namespace {

struct Fixture {
  SpatialGrid grid{128, -2.2, 2.2};
  DoubleWellParams p{620.0, 63.6};
  EigenBasis basis = solve_eigenpairs(build_hamiltonian(grid, p, MassScale()), 16, grid.spacing());
  RealMatrix theta = shallow_projector(basis, partition(grid, p));
  RateMatrix w = rate_matrix(basis, grid, BathParams{200.0, 30.0, 20.0});
};

// exp(W t) p via the symmetrised generator D^-1/2 W D^1/2
RealVector population_oracle(const RateMatrix& w, const RealVector& pi, const RealVector& p0, double t) {
  const RealVector s = pi.cwiseSqrt();
  const RealMatrix sym = s.cwiseInverse().asDiagonal() * w.rates * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (sym + sym.transpose()));
  const RealVector lam = (es.eigenvalues() * t).array().exp();
  const RealMatrix e = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return s.asDiagonal() * (e * (s.cwiseInverse().asDiagonal() * p0));
}

}  // namespace

TEST_CASE("eigenbasis projection of an eigenstate") {
  Fixture f;
  const auto grid_state = init_from_eigenstate(f.grid, f.basis, 2);
  const auto e = to_eigenbasis(grid_state, f.basis);
  const auto ref = eigenstate_density(16, 2);
  CHECK((e.rho - ref.rho).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(e.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("master equation rhs") {
  Fixture f;
  ComplexMatrix rho = ComplexMatrix::Zero(16, 16);
  rho(0, 0) = 0.7;
  rho(1, 1) = 0.3;
  rho(0, 1) = Complex(0.2, 0.1);
  rho(1, 0) = std::conj(rho(0, 1));
  const ComplexMatrix closed = master_rhs(rho, f.basis.energies, nullptr);
  const double w01 = (f.basis.energies(0) - f.basis.energies(1)) / units::kHbar;
  CHECK(std::abs(closed(0, 1) - Complex(0.0, -w01) * rho(0, 1)) <= 1e-12);
  CHECK(std::abs(closed(0, 0)) == 0.0);

  const ComplexMatrix open = master_rhs(rho, f.basis.energies, &f.w);
  CHECK(std::abs(open.trace()) <= 1e-12);
  CHECK((open - open.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  const RealVector g = f.w.out_rates();
  CHECK(open(1, 1).real() == doctest::Approx(f.w.rates(1, 0) * 0.7 - g(1) * 0.3).epsilon(1e-12));
  CHECK(std::abs(open(0, 1) - closed(0, 1) + 0.5 * (g(0) + g(1)) * rho(0, 1)) <= 1e-12);
}

TEST_CASE("closed propagation applies exact phases") {
  Fixture f;
  const LindbladPropagator prop(f.basis.energies);
  EigenDensityMatrix st = to_eigenbasis(init_gaussian(f.grid, -1.0, 0.18), f.basis);
  const ComplexMatrix r0 = st.rho;
  for (int i = 0; i < 1000; ++i) prop.rk4_step(st, 1e-3);
  double err = 0.0;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const double w = (f.basis.energies(i) - f.basis.energies(j)) / units::kHbar;
      err = std::max(err, std::abs(st.rho(i, j) - r0(i, j) * std::polar(1.0, -w * 1.0)));
    }
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("populations follow exp(W t)") {
  Fixture f;
  const LindbladPropagator prop(f.basis.energies, f.w);
  EigenDensityMatrix st = eigenstate_density(16, 0);
  for (int i = 0; i < 5000; ++i) prop.rk4_step(st, 1e-3);
  const RealVector pi = boltzmann_distribution(f.basis.energies, 200.0);
  const RealVector ref = population_oracle(f.w, pi, RealVector::Unit(16, 0), 5.0);
  CHECK((st.rho.diagonal().real() - ref).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("long run relaxes to the boltzmann distribution") {
  Fixture f;
  const LindbladPropagator prop(f.basis.energies, f.w);
  IntegrationOptions o{200.0, 1e-3, 10.0, 0};
  const auto t = evolve(eigenstate_density(16, 0), prop, o, EigenProbe{f.theta});
  const RealVector pi = boltzmann_distribution(f.basis.energies, 200.0);
  CHECK((t.occupations.back() - pi).cwiseAbs().maxCoeff() <= 1e-6);
  double trace = 0.0;
  for (double d : t.trace_defect) trace = std::max(trace, d);
  CHECK(trace <= 1e-10);
  CHECK(t.p_shallow.back() == doctest::Approx(pi.dot(f.theta.diagonal())).epsilon(1e-6));
}

TEST_CASE("stability guard") {
  Fixture f;
  const LindbladPropagator prop(f.basis.energies, f.w);
  EigenDensityMatrix st = eigenstate_density(16, 0);
  const double dt = 0.1 / prop.max_out_rate();
  CHECK_THROWS_AS(prop.rk4_step(st, dt * 1.01), NumericalError);
  CHECK_NOTHROW(prop.rk4_step(st, dt * 0.99));
}

TEST_CASE("thermal population goes mainly to the first excited state") {
  Fixture f;
  const RateMatrix w = rate_matrix(f.basis, f.grid, BathParams{200.0, 80.0, 10.0});
  const LindbladPropagator prop(f.basis.energies, w);
  IntegrationOptions o{20.0, 1e-3, 20.0, 0};
  const auto t = evolve(eigenstate_density(16, 0), prop, o, EigenProbe{f.theta});
  const RealVector occ = t.occupations.back();
  CHECK(occ(1) > occ.tail(14).sum());
  CHECK(occ(1) > 0.5 * (1.0 - occ(0)));
}
