#include "rrc/controllers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rrc {

namespace {

void check_discretization(double g, double ts, const char* what) {
  if (!std::isfinite(g) || g <= 0.0) {
    throw std::invalid_argument(std::string(what) + ": cutoff must be > 0");
  }
  if (!std::isfinite(ts) || ts <= 0.0) {
    throw std::invalid_argument(std::string(what) + ": sample period must be > 0");
  }
  if (g * ts >= 2.0) {
    throw std::invalid_argument(std::string(what) + ": cutoff * sample period must be < 2");
  }
}

}  // namespace

LowPassFilter::LowPassFilter(double cutoff, double sample_period)
    : g_(cutoff), ts_(sample_period) {
  check_discretization(cutoff, sample_period, "LowPassFilter");
  const double gt = g_ * ts_;
  a_ = (2.0 - gt) / (2.0 + gt);
  b_ = gt / (2.0 + gt);
}

double LowPassFilter::update(double input) {
  y_ = a_ * y_ + b_ * (input + x_prev_);
  x_prev_ = input;
  return y_;
}

PseudoDifferentiator::PseudoDifferentiator(double gain, double sample_period) : g_(gain) {
  check_discretization(gain, sample_period, "PseudoDifferentiator");
  const double gt = g_ * sample_period;
  a_ = (2.0 - gt) / (2.0 + gt);
  b_ = 2.0 * g_ / (2.0 + gt);
}

double PseudoDifferentiator::update(double sample) {
  // The first sample only establishes the reference so that a nonzero
  // initial position does not register as an impulse in velocity.
  if (!primed_) {
    x_prev_ = sample;
    primed_ = true;
    return y_;
  }
  y_ = a_ * y_ + b_ * (sample - x_prev_);
  x_prev_ = sample;
  return y_;
}

DisturbanceObserver::DisturbanceObserver(double cutoff, double nominal_mass, double sample_period)
    : g_(cutoff), nominal_mass_(nominal_mass), filter_(cutoff, sample_period) {
  if (!std::isfinite(nominal_mass) || nominal_mass <= 0.0) {
    throw std::invalid_argument("DisturbanceObserver: nominal mass must be > 0");
  }
}

double DisturbanceObserver::update(double applied_force, double velocity) {
  const double momentum_term = g_ * nominal_mass_ * velocity;
  estimate_ = filter_.update(applied_force + momentum_term) - momentum_term;
  return estimate_;
}

void ControllerConfig::validate(double sample_period) const {
  if (!std::isfinite(ratio) || ratio <= 0.0) {
    throw std::invalid_argument("controller.K must be > 0");
  }
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw std::invalid_argument("controller.alpha must be > 0");
  }
  if (!std::isfinite(nominal_motor_mass) || nominal_motor_mass <= 0.0) {
    throw std::invalid_argument("controller.M_mn must be > 0");
  }
  check_discretization(dob_cutoff, sample_period, "controller.g_d");
  check_discretization(diff_cutoff, sample_period, "controller.g_l");
}

ControllerConfig table3_controller() {
  return {Variant::conventional_rrc, 4.40, 100.0, 3000.0, 90.0, 1.20};
}

ControllerConfig table4_controller() {
  return {Variant::proposed_rrc, 2.62, 500.0, 3000.0, 90.0, 1.20};
}

ConventionalRrc::ConventionalRrc(const ControllerConfig& cfg, double sample_period)
    : ratio_(cfg.ratio),
      diff_(cfg.diff_cutoff, sample_period),
      rate_filter_(cfg.diff_cutoff, sample_period),
      observer_(cfg.dob_cutoff, cfg.nominal_motor_mass, sample_period) {}

double ConventionalRrc::force(double u_fb, double motor_position) {
  // s * (g_l/(s+g_l)) * (g_l s/(s+g_l)) x: acceleration from two pseudo-differentiations.
  const double velocity = rate_filter_.update(diff_.update(motor_position));
  const double f_hat = observer_.update(applied_prev_, velocity);
  return ratio_ * u_fb + (1.0 - ratio_) * f_hat;
}

ProposedRrc::ProposedRrc(const ControllerConfig& cfg, double sample_period)
    : ratio_(cfg.ratio),
      diff_(cfg.diff_cutoff, sample_period),
      rate_filter_(cfg.diff_cutoff, sample_period),
      observer_(cfg.dob_cutoff, cfg.nominal_motor_mass, sample_period) {}

double ProposedRrc::force(double u_fb, double relative_position) {
  const double velocity = rate_filter_.update(diff_.update(relative_position));
  const double f_hat = observer_.update(applied_prev_, velocity);
  return ratio_ * u_fb + (1.0 - ratio_) * f_hat;
}

double state_feedback(const PlantState& cmd, const PlantState& meas, const FeedbackGains& g) {
  return g.k_pm * (cmd.x_m - meas.x_m) + g.k_dm * (cmd.v_m - meas.v_m) +
         g.k_pl * (cmd.x_l - meas.x_l) + g.k_dl * (cmd.v_l - meas.v_l);
}

Controller::Controller(const ControllerConfig& cfg, const FeedbackGains& gains,
                       double sample_period)
    : cfg_(cfg),
      gains_(gains),
      diff_m_(cfg.diff_cutoff, sample_period),
      diff_l_(cfg.diff_cutoff, sample_period) {
  cfg.validate(sample_period);
  if (cfg.variant == Variant::conventional_rrc) {
    rrc_.emplace<ConventionalRrc>(cfg, sample_period);
  } else if (cfg.variant == Variant::proposed_rrc) {
    rrc_.emplace<ProposedRrc>(cfg, sample_period);
  }
}

ControlOutput Controller::update(double x_m, double x_l, const PlantState& cmd,
                                 double feedforward) {
  const PlantState meas{x_m, diff_m_.update(x_m), x_l, diff_l_.update(x_l)};
  ControlOutput out;
  out.u_fb = state_feedback(cmd, meas, gains_) + feedforward;
  if (auto* conv = std::get_if<ConventionalRrc>(&rrc_)) {
    out.force = conv->force(out.u_fb, x_m);
    out.f_hat = conv->estimate();
  } else if (auto* prop = std::get_if<ProposedRrc>(&rrc_)) {
    out.force = prop->force(out.u_fb, x_m - x_l);
    out.f_hat = prop->estimate();
  } else {
    out.force = out.u_fb;
  }
  return out;
}

void Controller::commit(double applied_force) {
  if (auto* conv = std::get_if<ConventionalRrc>(&rrc_)) {
    conv->commit(applied_force);
  } else if (auto* prop = std::get_if<ProposedRrc>(&rrc_)) {
    prop->commit(applied_force);
  }
}

}  // namespace rrc
