#include "doctest.h"

#include "tunnel/csv.hpp"
#include "tunnel/units.hpp"

using namespace tunnel;

TEST_CASE("wavenumber to angular frequency") {
  CHECK(units::wavenumber_to_angular_frequency(1.0) == doctest::Approx(0.18836515673088533).epsilon(1e-15));
  CHECK(units::angular_frequency_to_wavenumber(units::wavenumber_to_angular_frequency(63.6)) ==
        doctest::Approx(63.6).epsilon(1e-15));
  CHECK(units::kHbar == doctest::Approx(5.3088374588761448).epsilon(1e-15));
}

TEST_CASE("thermal energy") {
  CHECK(units::thermal_energy(200.0) == doctest::Approx(139.00696008).epsilon(1e-14));
  CHECK(units::thermal_energy(0.0) == 0.0);
  CHECK_THROWS_AS(units::thermal_energy(-1.0), ValidationError);
}

TEST_CASE("kinetic energy scale of a proton over one angstrom") {
  CHECK(units::kinetic_energy_scale(units::kProtonMassKg, units::kAngstrom) ==
        doctest::Approx(16.735851307578467).epsilon(1e-12));
}

TEST_CASE("csv numbers round trip") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(csv::number(x)) == x);
  }
}
