#pragma once

#include <complex>

namespace rrc {

/// Physical constants of a motor mass and a load mass coupled by a spring.
struct PlantParams {
  double motor_mass = 0.0;     // Mm [kg]
  double load_mass = 0.0;      // Ml [kg]
  double spring_coeff = 0.0;   // Ks [N/m]
  double force_coeff = 1.0;    // Kt [N/A], only used to convert currents
  double damping_motor = 0.0;  // c_m [N s/m]
  double damping_load = 0.0;   // c_l [N s/m]

  double total_mass() const { return motor_mass + load_mass; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  bool operator==(const PlantParams&) const = default;
};

/// Unloaded rig.
PlantParams table1_plant();
/// Rig with the added load weight. Kt is not re-identified and is carried over.
PlantParams table2_plant();

struct PlantState {
  double x_m = 0.0;
  double v_m = 0.0;
  double x_l = 0.0;
  double v_l = 0.0;

  double relative_position() const { return x_m - x_l; }
  double relative_velocity() const { return v_m - v_l; }

  bool finite() const;

  PlantState operator+(const PlantState& o) const {
    return {x_m + o.x_m, v_m + o.v_m, x_l + o.x_l, v_l + o.v_l};
  }
  PlantState operator*(double s) const { return {x_m * s, v_m * s, x_l * s, v_l * s}; }
  bool operator==(const PlantState&) const = default;
};

/// Resonance (pole) and antiresonance (zero) of the motor-side response.
struct CharacteristicFreqs {
  double omega_p = 0.0;
  double omega_z = 0.0;
  double f_p = 0.0;
  double f_z = 0.0;
};

/// Time derivative of the state under motor force `force_in` and the
/// disturbance forces acting against each mass.
PlantState plant_derivative(const PlantState& state, double force_in, double dist_m,
                            double dist_l, const PlantParams& params);

CharacteristicFreqs characteristic_freqs(const PlantParams& params);

enum class Channel { motor, load, relative };

/// Undamped force-to-position transfer function evaluated at s = j*omega.
/// Rejects omega within a 1e-9 relative band of the resonance.
std::complex<double> frequency_response(const PlantParams& params, Channel channel, double omega);

/// Relative guard band around omega_p inside which frequency_response refuses to evaluate.
inline constexpr double kPoleGuardBand = 1e-9;

}  // namespace rrc
