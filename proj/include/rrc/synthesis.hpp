#pragma once

#include <optional>
#include <string>

#include "rrc/plant.hpp"

namespace rrc {

enum class Variant { conventional_rrc, proposed_rrc, state_feedback_only };

const char* to_string(Variant v);
/// Accepts "conventional_rrc"/"conventional", "proposed_rrc"/"proposed",
/// "state_feedback_only"/"state_feedback". Throws std::invalid_argument otherwise.
Variant parse_variant(const std::string& s);

/// Two-inertia parameters as seen by the outer loop once the RRC is closed.
struct ModifiedParams {
  double motor_mass = 0.0;
  double load_mass = 0.0;
  double spring_coeff = 0.0;
  double omega_p = 0.0;

  double f_p() const;
};

/// State-feedback gains, u = Kpm*e_xm + Kdm*e_vm + Kpl*e_xl + Kdl*e_vl.
struct FeedbackGains {
  double k_pm = 0.0;
  double k_dm = 0.0;
  double k_pl = 0.0;
  double k_dl = 0.0;
};

/// x_l/u = numerator_gain / (s^4 + a3 s^3 + a2 s^2 + a1 s + a0).
struct ClosedLoopCoeffs {
  double numerator_gain = 0.0;
  double a3 = 0.0;
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
};

/// Relative-position RRC: the motor looks K times lighter while the total
/// mass and the load-side pole Ks/Ml are preserved.
/// Throws std::invalid_argument when K <= Mm/(Mm+Ml).
ModifiedParams modified_params(const PlantParams& params, double ratio);

/// Motor-side-DOB RRC: only the motor mass is scaled by 1/K.
ModifiedParams conventional_modified_params(const PlantParams& params, double ratio);

ClosedLoopCoeffs closed_loop_coeffs(const PlantParams& params, double ratio,
                                    const FeedbackGains& gains);

/// Places all four closed-loop poles at s = -alpha for the relative-position
/// RRC with ratio K. With K = 1 this is plain two-inertia pole placement.
FeedbackGains quadruple_pole_gains(const PlantParams& params, double ratio, double alpha);

/// Gains giving (s + alpha)^4 for the loop actually formed by `variant`.
/// The conventional RRC reuses the same closed forms on its own modified
/// plant (Mm/K, Ml, Ks) with K = 1.
FeedbackGains design_gains(Variant variant, const PlantParams& params, double ratio, double alpha);

/// Set when a proportional gain is non-positive (aggressive or degenerate design).
std::optional<std::string> gain_warning(const FeedbackGains& gains);

/// Routh-Hurwitz test for the monic quartic; true iff every root has Re < 0.
bool routh_stable(const ClosedLoopCoeffs& coeffs);

}  // namespace rrc
