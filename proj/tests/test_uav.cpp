#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "lisac/uav.hpp"

using namespace lisac;

namespace {

// frozen scalar oracles, evaluated independently before the build
constexpr double kEnergy10 = 126.02347844038786;
constexpr double kEnergy30 = 356.2767759197517;
constexpr double kEnergy60 = 2142.097421090167;
constexpr double kRatio60v30 = 6.012453142813485;

}  // namespace

TEST_SUITE("uav") {

TEST_CASE("kinematics") {
  const Position start{100, 100, 40};
  const Position still = step_position(start, 0.0, 1.2, 1.0);
  CHECK(still.x == start.x);
  CHECK(still.y == start.y);
  CHECK(still.z == start.z);

  const Position north = step_position(start, 10.0, std::numbers::pi / 2, 1.0);
  CHECK(north.x == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(north.y == doctest::Approx(110.0).epsilon(1e-12));
  CHECK(north.z == 40.0);

  const Position east = step_position(start, 30.0, 0.0, 1.0);
  CHECK(east.x == doctest::Approx(130.0).epsilon(1e-12));
  CHECK(east.y == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("hover energy is the sum of the two hover powers") {
  const EnergyParams p;
  CHECK(propulsion_energy(0.0, p) == doctest::Approx(168.48).epsilon(1e-9));
}

TEST_CASE("cruise energies match the frozen oracle") {
  const EnergyParams p;
  CHECK(propulsion_energy(10.0, p) == doctest::Approx(kEnergy10).epsilon(1e-9));
  CHECK(propulsion_energy(30.0, p) == doctest::Approx(kEnergy30).epsilon(1e-9));
  CHECK(propulsion_energy(60.0, p) == doctest::Approx(kEnergy60).epsilon(1e-9));
  CHECK(propulsion_energy(60.0, p) / propulsion_energy(30.0, p) ==
        doctest::Approx(kRatio60v30).epsilon(1e-9));
}

TEST_CASE("negative speed is rejected") {
  const EnergyParams p;
  CHECK_THROWS_AS(propulsion_energy(-0.1, p), std::invalid_argument);
}

TEST_CASE("energy stays finite across the speed range") {
  const EnergyParams p;
  for (double v = 0.0; v <= 200.0; v += 0.5) CHECK(std::isfinite(propulsion_energy(v, p)));
}

TEST_CASE("energy has an interior minimum") {
  const EnergyParams p;
  const double hover = propulsion_energy(0.0, p);
  // the oracle scan put the minimum near 10.2 m/s
  CHECK(propulsion_energy(10.21, p) < hover);
  CHECK(propulsion_energy(10.21, p) == doctest::Approx(125.99710785037249).epsilon(1e-9));
}

TEST_CASE("slot length scales the energy") {
  EnergyParams p;
  p.t_d = 0.5;
  const EnergyParams unit;
  CHECK(propulsion_energy(12.0, p) ==
        doctest::Approx(0.5 * propulsion_energy(12.0, unit)).epsilon(1e-12));
}

}  // TEST_SUITE
