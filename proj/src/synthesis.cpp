#include "rrc/synthesis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rrc {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::conventional_rrc:
      return "conventional_rrc";
    case Variant::proposed_rrc:
      return "proposed_rrc";
    case Variant::state_feedback_only:
      return "state_feedback_only";
  }
  return "unknown";
}

Variant parse_variant(const std::string& s) {
  if (s == "conventional_rrc" || s == "conventional") return Variant::conventional_rrc;
  if (s == "proposed_rrc" || s == "proposed") return Variant::proposed_rrc;
  if (s == "state_feedback_only" || s == "state_feedback") return Variant::state_feedback_only;
  throw std::invalid_argument("unknown controller variant '" + s + "'");
}

double ModifiedParams::f_p() const { return omega_p / (2.0 * std::numbers::pi); }

ModifiedParams modified_params(const PlantParams& params, double ratio) {
  params.validate();
  const double mm = params.motor_mass;
  const double ml = params.load_mass;
  const double bound = mm / (mm + ml);
  if (!std::isfinite(ratio) || ratio <= bound) {
    std::ostringstream msg;
    msg << "resonance ratio gain yields non-physical modified load mass: K = " << ratio
        << " must exceed Mm/(Mm+Ml) = " << bound;
    throw std::invalid_argument(msg.str());
  }
  ModifiedParams m;
  m.motor_mass = mm / ratio;
  m.load_mass = (ratio * (mm + ml) - mm) / ratio;
  m.spring_coeff = m.load_mass / ml * params.spring_coeff;
  m.omega_p = std::sqrt(ratio) * characteristic_freqs(params).omega_p;
  return m;
}

ModifiedParams conventional_modified_params(const PlantParams& params, double ratio) {
  params.validate();
  if (!std::isfinite(ratio) || ratio <= 0.0) {
    throw std::invalid_argument("resonance ratio gain must be > 0");
  }
  ModifiedParams m;
  m.motor_mass = params.motor_mass / ratio;
  m.load_mass = params.load_mass;
  m.spring_coeff = params.spring_coeff;
  m.omega_p = std::sqrt(params.spring_coeff * (1.0 / m.motor_mass + 1.0 / m.load_mass));
  return m;
}

ClosedLoopCoeffs closed_loop_coeffs(const PlantParams& params, double ratio,
                                    const FeedbackGains& g) {
  params.validate();
  if (!std::isfinite(ratio) || ratio <= 0.0) {
    throw std::invalid_argument("resonance ratio gain must be > 0");
  }
  const double mm = params.motor_mass;
  const double ml = params.load_mass;
  const double ks = params.spring_coeff;
  const double k = ratio;
  ClosedLoopCoeffs c;
  c.numerator_gain = k * k * ks / (mm * ml);
  c.a3 = k * g.k_dm / mm;
  c.a2 = k * (ks * mm + ml * (ks + g.k_pm)) / (mm * ml);
  c.a1 = k * ks * (g.k_dm + g.k_dl) / (mm * ml);
  c.a0 = k * ks * (g.k_pm + g.k_pl) / (mm * ml);
  return c;
}

FeedbackGains quadruple_pole_gains(const PlantParams& params, double ratio, double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw std::invalid_argument("pole alpha must be > 0");
  }
  modified_params(params, ratio);  // validates K
  const double mm = params.motor_mass;
  const double ml = params.load_mass;
  const double ks = params.spring_coeff;
  const double k = ratio;
  const double a2 = alpha * alpha;
  const double a4 = a2 * a2;
  FeedbackGains g;
  g.k_pm = (6.0 * a2 * mm * ml - k * ks * (mm + ml)) / (k * ml);
  g.k_pl = (mm * (a4 * ml * ml - 6.0 * a2 * ks * ml) + k * ks * ks * (mm + ml)) / (k * ml * ks);
  g.k_dm = 4.0 * alpha * mm / k;
  g.k_dl = mm * (4.0 * a2 * alpha * ml - 4.0 * alpha * ks) / (k * ks);
  return g;
}

FeedbackGains design_gains(Variant variant, const PlantParams& params, double ratio,
                           double alpha) {
  switch (variant) {
    case Variant::proposed_rrc:
      return quadruple_pole_gains(params, ratio, alpha);
    case Variant::conventional_rrc: {
      const auto m = conventional_modified_params(params, ratio);
      PlantParams lightened = params;
      lightened.motor_mass = m.motor_mass;
      return quadruple_pole_gains(lightened, 1.0, alpha);
    }
    case Variant::state_feedback_only:
      return quadruple_pole_gains(params, 1.0, alpha);
  }
  throw std::invalid_argument("design_gains: unknown variant");
}

std::optional<std::string> gain_warning(const FeedbackGains& g) {
  if (g.k_pm <= 0.0 || g.k_pl <= 0.0) {
    std::ostringstream msg;
    msg << "non-positive proportional gain (K_pm = " << g.k_pm << ", K_pl = " << g.k_pl
        << "); pole placement is aggressive or degenerate for this plant";
    return msg.str();
  }
  return std::nullopt;
}

bool routh_stable(const ClosedLoopCoeffs& c) {
  // s^4 + a3 s^3 + a2 s^2 + a1 s + a0: first Routh column is
  // 1, a3, (a3 a2 - a1)/a3, a1 - a3^2 a0/(a3 a2 - a1), a0.
  if (!(c.a3 > 0.0 && c.a2 > 0.0 && c.a1 > 0.0 && c.a0 > 0.0)) return false;
  const double b1 = c.a3 * c.a2 - c.a1;
  if (!(b1 > 0.0)) return false;
  return c.a3 * c.a2 * c.a1 - c.a1 * c.a1 - c.a3 * c.a3 * c.a0 > 0.0;
}

}  // namespace rrc
