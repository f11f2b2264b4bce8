#pragma once

#include <variant>

#include "rrc/plant.hpp"
#include "rrc/synthesis.hpp"

namespace rrc {

/// Bilinear (trapezoidal) first-order low-pass g/(s+g).
class LowPassFilter {
 public:
  LowPassFilter(double cutoff, double sample_period);

  double update(double input);
  double output() const { return y_; }
  double cutoff() const { return g_; }

 private:
  double g_;
  double ts_;
  double a_;  // (2 - gT)/(2 + gT)
  double b_;  // gT/(2 + gT)
  double x_prev_ = 0.0;
  double y_ = 0.0;
};

/// Band-limited differentiator g s/(s+g), bilinear discretization.
class PseudoDifferentiator {
 public:
  PseudoDifferentiator(double gain, double sample_period);

  /// Feeds one position sample, returns the rate estimate.
  double update(double sample);
  double output() const { return y_; }

 private:
  double g_;
  double a_;  // (2 - gT)/(2 + gT)
  double b_;  // 2g/(2 + gT)
  double x_prev_ = 0.0;
  bool primed_ = false;
  double y_ = 0.0;
};

/// Velocity-form disturbance observer for a nominal mass M_n:
///   F_hat = L(F + g M_n v) - g M_n v  ==  L(F - M_n s v)
/// so the measured position is differentiated only once, by the caller's
/// pseudo-differentiator.
class DisturbanceObserver {
 public:
  DisturbanceObserver(double cutoff, double nominal_mass, double sample_period);

  /// `applied_force` is the force that acted over the last control period.
  double update(double applied_force, double velocity);
  double estimate() const { return estimate_; }

 private:
  double g_;
  double nominal_mass_;
  LowPassFilter filter_;
  double estimate_ = 0.0;
};

struct ControllerConfig {
  Variant variant = Variant::proposed_rrc;
  double ratio = 1.0;              // K
  double dob_cutoff = 100.0;       // g_d [rad/s]
  double diff_cutoff = 3000.0;     // g_l [rad/s]
  double alpha = 90.0;             // quadruple pole [rad/s]
  double nominal_motor_mass = 1.0; // M_mn [kg]

  /// Throws std::invalid_argument on out-of-range fields.
  void validate(double sample_period) const;

  bool operator==(const ControllerConfig&) const = default;
};

/// Conventional RRC controller settings for the unloaded rig.
ControllerConfig table3_controller();
/// Relative-position RRC controller settings for the unloaded rig.
ControllerConfig table4_controller();

/// Motor-side DOB resonance ratio control. Consumes the motor position only.
class ConventionalRrc {
 public:
  ConventionalRrc(const ControllerConfig& cfg, double sample_period);

  /// F_in = K u_fb + (1 - K) F_hat, with F_hat = L_d(F_prev - M_mn a_m).
  double force(double u_fb, double motor_position);
  /// Records the force actually applied (after saturation) for the next tick.
  void commit(double applied_force) { applied_prev_ = applied_force; }
  double estimate() const { return observer_.estimate(); }

 private:
  double ratio_;
  PseudoDifferentiator diff_;
  LowPassFilter rate_filter_;
  DisturbanceObserver observer_;
  double applied_prev_ = 0.0;
};

/// Relative-position resonance ratio control. Its only plant measurement is
/// x_r = x_m - x_l and its only model parameter is M_mn.
class ProposedRrc {
 public:
  ProposedRrc(const ControllerConfig& cfg, double sample_period);

  /// F_in = K u_fb + (1 - K) F_hat_r, with F_hat_r = L_d(F_prev - M_mn a_r).
  double force(double u_fb, double relative_position);
  void commit(double applied_force) { applied_prev_ = applied_force; }
  double estimate() const { return observer_.estimate(); }

 private:
  double ratio_;
  PseudoDifferentiator diff_;
  LowPassFilter rate_filter_;
  DisturbanceObserver observer_;
  double applied_prev_ = 0.0;
};

/// u = Kpm(x_m* - x_m) + Kdm(v_m* - v_m) + Kpl(x_l* - x_l) + Kdl(v_l* - v_l).
double state_feedback(const PlantState& cmd, const PlantState& meas, const FeedbackGains& gains);

struct ControlOutput {
  double u_fb = 0.0;
  double f_hat = 0.0;
  double force = 0.0;  // before saturation
};

/// Complete discrete controller: velocity estimation, state feedback and the
/// configured RRC variant.
class Controller {
 public:
  Controller(const ControllerConfig& cfg, const FeedbackGains& gains, double sample_period);

  /// `x_m`, `x_l` are the (possibly quantized) encoder readings; `feedforward`
  /// is added to the state-feedback output before the RRC.
  ControlOutput update(double x_m, double x_l, const PlantState& cmd, double feedforward = 0.0);
  /// Must be called once per tick with the saturated force.
  void commit(double applied_force);

  const ControllerConfig& config() const { return cfg_; }
  const FeedbackGains& gains() const { return gains_; }

 private:
  ControllerConfig cfg_;
  FeedbackGains gains_;
  PseudoDifferentiator diff_m_;
  PseudoDifferentiator diff_l_;
  std::variant<std::monostate, ConventionalRrc, ProposedRrc> rrc_;
};

}  // namespace rrc
