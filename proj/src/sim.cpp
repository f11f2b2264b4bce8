#include "rrc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rrc {

void SimConfig::validate() const {
  if (!(control_period > 0.0) || !std::isfinite(control_period)) {
    throw std::invalid_argument("sim.Ts must be > 0");
  }
  if (substeps < 1) throw std::invalid_argument("sim.substeps must be >= 1");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("sim.duration must be > 0");
  }
  if (!(actuator_limit > 0.0)) throw std::invalid_argument("sim.actuator_limit must be > 0");
  if (quantization_enabled && !(encoder_resolution > 0.0)) {
    throw std::invalid_argument("sim.encoder_resolution must be > 0 when quantization is enabled");
  }
  if (!(divergence_limit > 0.0)) throw std::invalid_argument("sim.divergence_limit must be > 0");
}

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration / control_period)) + 1;
}

double DisturbanceSegment::value(double t) const {
  if (t < start || t >= end) return 0.0;
  return offset + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t + phase);
}

namespace {

void validate_segments(const std::vector<DisturbanceSegment>& segs, const char* channel) {
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!(s.start < s.end)) {
      throw std::invalid_argument(std::string("disturbance.") + channel +
                                  ": segment start must precede end");
    }
    if (i > 0 && s.start < segs[i - 1].end) {
      throw std::invalid_argument(std::string("disturbance.") + channel +
                                  ": segments overlap or are out of order");
    }
  }
}

double sum_segments(const std::vector<DisturbanceSegment>& segs, double t) {
  double v = 0.0;
  for (const auto& s : segs) v += s.value(t);
  return v;
}

double quantize(double x, double resolution) { return std::floor(x / resolution) * resolution; }

}  // namespace

void DisturbanceSchedule::validate() const {
  validate_segments(motor, "motor");
  validate_segments(load, "load");
}

double DisturbanceSchedule::motor_at(double t) const { return sum_segments(motor, t); }
double DisturbanceSchedule::load_at(double t) const { return sum_segments(load, t); }

CommandProfile CommandProfile::step(double start, double height) {
  CommandProfile p;
  p.kind = Kind::step;
  p.start = start;
  p.height = height;
  return p;
}

CommandProfile CommandProfile::chirp(double start, double f0, double f1, double sweep_time,
                                     double amplitude) {
  if (!(f0 < f1) || !(sweep_time > 0.0)) {
    throw std::invalid_argument("chirp requires f0 < f1 and sweep_time > 0");
  }
  CommandProfile p;
  p.kind = Kind::chirp;
  p.start = start;
  p.f0 = f0;
  p.f1 = f1;
  p.sweep_time = sweep_time;
  p.height = amplitude;
  return p;
}

double CommandProfile::position(double t) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::step:
      return t >= start ? height : 0.0;
    case Kind::chirp: {
      const double tau = t - start;
      if (tau < 0.0 || tau > sweep_time) return 0.0;
      const double rate = (f1 - f0) / sweep_time;
      return height * std::sin(2.0 * std::numbers::pi * (f0 * tau + 0.5 * rate * tau * tau));
    }
  }
  return 0.0;
}

double CommandProfile::velocity(double t) const {
  if (kind != Kind::chirp) return 0.0;
  const double tau = t - start;
  if (tau < 0.0 || tau > sweep_time) return 0.0;
  const double rate = (f1 - f0) / sweep_time;
  const double phase = 2.0 * std::numbers::pi * (f0 * tau + 0.5 * rate * tau * tau);
  return height * 2.0 * std::numbers::pi * (f0 + rate * tau) * std::cos(phase);
}

double ForceProfile::at(double t) const {
  double v = constant;
  if (!samples.empty() && sample_period > 0.0 && t >= 0.0) {
    // Small bias keeps sample boundaries that land on control ticks stable.
    const auto idx = static_cast<std::size_t>(std::floor(t / sample_period + 1e-9));
    if (idx < samples.size()) v += samples[idx];
  }
  return v;
}

void Trajectory::reserve(std::size_t n) {
  for (auto* col : {&t, &x_m, &v_m, &x_l, &v_l, &x_r, &cmd, &u_fb, &f_hat, &f_applied, &dist_m,
                    &dist_l}) {
    col->reserve(n);
  }
}

double energy(const PlantState& s, const PlantParams& p) {
  const double xr = s.relative_position();
  return 0.5 * p.motor_mass * s.v_m * s.v_m + 0.5 * p.load_mass * s.v_l * s.v_l +
         0.5 * p.spring_coeff * xr * xr;
}

PlantState rk4_step(const PlantState& s, double force, double t, double h,
                    const PlantParams& params, const DisturbanceSchedule& dist) {
  auto f = [&](const PlantState& x, double tt) {
    return plant_derivative(x, force, dist.motor_at(tt), dist.load_at(tt), params);
  };
  const PlantState k1 = f(s, t);
  const PlantState k2 = f(s + k1 * (0.5 * h), t + 0.5 * h);
  const PlantState k3 = f(s + k2 * (0.5 * h), t + 0.5 * h);
  const PlantState k4 = f(s + k3 * h, t + h);
  return s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

Trajectory run_simulation(const PlantParams& plant, const ControllerConfig& ctrl,
                          const FeedbackGains& gains, const Scenario& scenario,
                          const SimConfig& sim) {
  plant.validate();
  sim.validate();
  scenario.disturbance.validate();
  Controller controller(ctrl, gains, sim.control_period);

  const std::size_t n = sim.sample_count();
  const double ts = sim.control_period;
  const double h = ts / sim.substeps;
  Trajectory traj;
  traj.reserve(n);

  auto blown_up = [&](const PlantState& s) {
    return !s.finite() || std::abs(s.x_m) > sim.divergence_limit ||
           std::abs(s.x_l) > sim.divergence_limit;
  };

  PlantState state = scenario.initial;
  for (std::size_t k = 0; k < n; ++k) {
    // Tick times are computed from the index to keep them drift-free.
    const double t = static_cast<double>(k) * ts;
    if (blown_up(state)) {
      traj.diverged = true;
      traj.diverged_at = t;
      break;
    }
    double xm_meas = state.x_m;
    double xl_meas = state.x_l;
    if (sim.quantization_enabled) {
      xm_meas = quantize(xm_meas, sim.encoder_resolution);
      xl_meas = quantize(xl_meas, sim.encoder_resolution);
    }
    const double ref = scenario.command.position(t);
    const double ref_rate = scenario.command.velocity(t);
    const PlantState cmd{ref, ref_rate, ref, ref_rate};
    const ControlOutput out =
        controller.update(xm_meas, xl_meas, cmd, scenario.feedforward.at(t));
    const double applied = std::clamp(out.force, -sim.actuator_limit, sim.actuator_limit);
    controller.commit(applied);

    traj.t.push_back(t);
    traj.x_m.push_back(state.x_m);
    traj.v_m.push_back(state.v_m);
    traj.x_l.push_back(state.x_l);
    traj.v_l.push_back(state.v_l);
    traj.x_r.push_back(state.relative_position());
    traj.cmd.push_back(ref);
    traj.u_fb.push_back(out.u_fb);
    traj.f_hat.push_back(out.f_hat);
    traj.f_applied.push_back(applied);
    traj.dist_m.push_back(scenario.disturbance.motor_at(t));
    traj.dist_l.push_back(scenario.disturbance.load_at(t));

    if (k + 1 == n) break;
    try {
      for (int j = 0; j < sim.substeps; ++j) {
        state = rk4_step(state, applied, t + j * h, h, plant, scenario.disturbance);
      }
    } catch (const std::invalid_argument&) {
      // A stage went non-finite; reported as divergence at the next tick.
      state.x_m = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return traj;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryCsvHeader << '\n';
  const std::vector<double>* cols[] = {&traj.t,   &traj.x_m,  &traj.v_m,   &traj.x_l,
                                       &traj.v_l, &traj.x_r,  &traj.cmd,   &traj.u_fb,
                                       &traj.f_hat, &traj.f_applied, &traj.dist_m, &traj.dist_l};
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (std::size_t c = 0; c < std::size(cols); ++c) {
      if (c) out << ',';
      out << format_number((*cols[c])[i]);
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(f, traj);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace rrc
