#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rrc/plant.hpp"

using namespace rrc;

TEST_CASE("characteristic frequencies of the unloaded and loaded rigs") {
  const auto f1 = characteristic_freqs(table1_plant());
  CHECK(f1.f_p == doctest::Approx(14.4).epsilon(0.005));
  CHECK(f1.f_z == doctest::Approx(10.4).epsilon(0.005));
  const auto f2 = characteristic_freqs(table2_plant());
  CHECK(f2.f_p == doctest::Approx(13.3).epsilon(0.005));
  CHECK(f2.f_z == doctest::Approx(8.85).epsilon(0.005));
  CHECK(f1.omega_p == doctest::Approx(2.0 * std::numbers::pi * f1.f_p).epsilon(1e-14));
}

TEST_CASE("resonance above antiresonance for any valid plant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int i = 0; i < 500; ++i) {
    PlantParams p;
    p.motor_mass = u(rng);
    p.load_mass = u(rng);
    p.spring_coeff = 1000.0 * u(rng);
    const auto f = characteristic_freqs(p);
    CHECK(f.omega_p > f.omega_z);
  }
}

TEST_CASE("frequencies need a valid plant") {
  PlantParams p = table1_plant();
  p.spring_coeff = 0.0;
  CHECK_THROWS_WITH_AS(characteristic_freqs(p), doctest::Contains("spring_coeff"),
                       std::invalid_argument);
}

TEST_CASE("validation names the field") {
  PlantParams p = table1_plant();
  p.load_mass = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("load_mass"), std::invalid_argument);
  p = table1_plant();
  p.motor_mass = std::nan("");
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("plant dynamics") {
  const PlantParams p = table1_plant();
  const PlantState s{1e-3, 0.1, -2e-3, 0.2};
  const auto d = plant_derivative(s, 5.0, 1.0, 2.0, p);
  const double xr = 3e-3;
  CHECK(d.x_m == 0.1);
  CHECK(d.x_l == 0.2);
  CHECK(d.v_m == doctest::Approx((-p.spring_coeff * xr + 5.0 - 1.0) / p.motor_mass));
  CHECK(d.v_l == doctest::Approx((p.spring_coeff * xr - 2.0) / p.load_mass));

  SUBCASE("at rest with no force nothing moves") {
    const auto z = plant_derivative({}, 0.0, 0.0, 0.0, p);
    CHECK(z == PlantState{});
  }
  SUBCASE("non-finite input is rejected") {
    CHECK_THROWS_AS(plant_derivative(s, INFINITY, 0.0, 0.0, p), std::invalid_argument);
  }
}

TEST_CASE("frequency response matches the state-space model") {
  const PlantParams p = table1_plant();
  const double wp = characteristic_freqs(p).omega_p;
  for (double ratio : {0.05, 0.3, 0.71, 0.99, 1.02, 1.7, 6.0}) {
    const double w = ratio * wp;
    CHECK(std::abs(frequency_response(p, Channel::motor, w) - oracle::response(p, 1, w)) ==
          doctest::Approx(0.0).epsilon(1e-12 * std::abs(oracle::response(p, 1, w))));
    const auto gl = frequency_response(p, Channel::load, w);
    CHECK(std::abs(gl - oracle::response(p, 2, w)) <= 1e-9 * std::abs(gl));
    const auto gr = frequency_response(p, Channel::relative, w);
    CHECK(std::abs(gr - oracle::response(p, 3, w)) <= 1e-9 * std::abs(gr));
  }
}

TEST_CASE("motor minus load response equals the relative response") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    PlantParams p;
    p.motor_mass = 0.1 + 5.0 * u(rng);
    p.load_mass = 0.1 + 5.0 * u(rng);
    p.spring_coeff = 100.0 + 1e5 * u(rng);
    const double wp = characteristic_freqs(p).omega_p;
    double w = wp * std::pow(10.0, 2.0 * u(rng) - 1.0);
    if (std::abs(w / wp - 1.0) < 1e-3) w *= 1.01;
    const auto gm = frequency_response(p, Channel::motor, w);
    const auto gl = frequency_response(p, Channel::load, w);
    const auto gr = frequency_response(p, Channel::relative, w);
    const double scale = std::max({std::abs(gm), std::abs(gl), std::abs(gr)});
    CHECK(std::abs(gm - gl - gr) <= 1e-12 * scale);
  }
}

TEST_CASE("motor response vanishes at the antiresonance") {
  const PlantParams p = table1_plant();
  const auto f = characteristic_freqs(p);
  CHECK(std::abs(frequency_response(p, Channel::motor, f.omega_z)) < 1e-15);
}

TEST_CASE("frequency response refuses the resonance and non-positive frequency") {
  const PlantParams p = table1_plant();
  const double wp = characteristic_freqs(p).omega_p;
  CHECK_THROWS_AS(frequency_response(p, Channel::load, wp), std::domain_error);
  CHECK_THROWS_AS(frequency_response(p, Channel::load, wp * (1.0 + 1e-12)), std::domain_error);
  CHECK_NOTHROW(frequency_response(p, Channel::load, wp * (1.0 + 1e-6)));
  CHECK_THROWS_AS(frequency_response(p, Channel::motor, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(frequency_response(p, Channel::motor, -1.0), std::invalid_argument);
}
