#include "rrc/plant.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rrc {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string("plant.") + name + " must be finite and > 0, got " +
                                std::to_string(v));
  }
}

void require_non_negative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string("plant.") + name + " must be finite and >= 0, got " +
                                std::to_string(v));
  }
}

}  // namespace

void PlantParams::validate() const {
  require_positive(motor_mass, "motor_mass");
  require_positive(load_mass, "load_mass");
  require_positive(spring_coeff, "spring_coeff");
  require_positive(force_coeff, "force_coeff");
  require_non_negative(damping_motor, "damping_motor");
  require_non_negative(damping_load, "damping_load");
}

PlantParams table1_plant() { return {1.20, 1.09, 4662.0, 33.0, 0.0, 0.0}; }

PlantParams table2_plant() { return {1.26, 1.59, 4917.0, 33.0, 0.0, 0.0}; }

bool PlantState::finite() const {
  return std::isfinite(x_m) && std::isfinite(v_m) && std::isfinite(x_l) && std::isfinite(v_l);
}

PlantState plant_derivative(const PlantState& state, double force_in, double dist_m,
                            double dist_l, const PlantParams& params) {
  if (!state.finite() || !std::isfinite(force_in) || !std::isfinite(dist_m) ||
      !std::isfinite(dist_l)) {
    throw std::invalid_argument("plant_derivative: non-finite state or input");
  }
  const double spring = params.spring_coeff * state.relative_position();
  return {
      state.v_m,
      (-spring + force_in - dist_m - params.damping_motor * state.v_m) / params.motor_mass,
      state.v_l,
      (spring - dist_l - params.damping_load * state.v_l) / params.load_mass,
  };
}

CharacteristicFreqs characteristic_freqs(const PlantParams& params) {
  params.validate();
  CharacteristicFreqs f;
  f.omega_p = std::sqrt(params.spring_coeff * (1.0 / params.motor_mass + 1.0 / params.load_mass));
  f.omega_z = std::sqrt(params.spring_coeff / params.load_mass);
  f.f_p = f.omega_p / (2.0 * std::numbers::pi);
  f.f_z = f.omega_z / (2.0 * std::numbers::pi);
  return f;
}

std::complex<double> frequency_response(const PlantParams& params, Channel channel, double omega) {
  params.validate();
  if (!std::isfinite(omega) || omega <= 0.0) {
    throw std::invalid_argument("frequency_response: omega must be > 0");
  }
  const auto freqs = characteristic_freqs(params);
  if (std::abs(omega - freqs.omega_p) / freqs.omega_p < kPoleGuardBand) {
    throw std::domain_error("frequency_response: omega is at the undamped resonance (singular)");
  }
  // s = j*omega, so s^2 = -omega^2 and every channel is real-valued.
  const double s2 = -omega * omega;
  const double wp2 = freqs.omega_p * freqs.omega_p;
  const double wz2 = freqs.omega_z * freqs.omega_z;
  const double mm = params.motor_mass;
  switch (channel) {
    case Channel::motor:
      return {(s2 + wz2) / (mm * s2 * (s2 + wp2)), 0.0};
    case Channel::load:
      return {wz2 / (mm * s2 * (s2 + wp2)), 0.0};
    case Channel::relative:
      return {1.0 / (mm * (s2 + wp2)), 0.0};
  }
  throw std::invalid_argument("frequency_response: unknown channel");
}

}  // namespace rrc
