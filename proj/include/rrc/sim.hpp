#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rrc/controllers.hpp"
#include "rrc/plant.hpp"
#include "rrc/synthesis.hpp"

namespace rrc {

struct SimConfig {
  double control_period = 1e-4;  // Ts [s]
  int substeps = 10;             // RK4 steps per control period
  double duration = 1.0;         // [s]
  double actuator_limit = 80.0;  // [N]
  double encoder_resolution = 50e-9;  // [m]
  bool quantization_enabled = true;
  double divergence_limit = 10.0;  // |position| beyond this aborts the run [m]

  void validate() const;
  /// Number of recorded samples, including t = 0.
  std::size_t sample_count() const;

  bool operator==(const SimConfig&) const = default;
};

/// One disturbance segment active on [start, end): offset + amplitude sin(2 pi f t + phase).
struct DisturbanceSegment {
  double start = 0.0;
  double end = 0.0;
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;  // [Hz]
  double phase = 0.0;      // [rad]

  double value(double t) const;

  bool operator==(const DisturbanceSegment&) const = default;
};

struct DisturbanceSchedule {
  std::vector<DisturbanceSegment> motor;
  std::vector<DisturbanceSegment> load;

  /// Segments must be ordered with start < end and must not overlap.
  void validate() const;
  double motor_at(double t) const;
  double load_at(double t) const;

  bool operator==(const DisturbanceSchedule&) const = default;
};

/// Position reference applied to both x_m and x_l commands.
struct CommandProfile {
  enum class Kind { none, step, chirp };
  Kind kind = Kind::none;
  double start = 0.0;      // [s]
  double height = 0.0;     // step height or chirp amplitude [m]
  double f0 = 0.0;         // chirp start frequency [Hz]
  double f1 = 0.0;         // chirp end frequency [Hz]
  double sweep_time = 0.0; // [s]

  static CommandProfile step(double start, double height);
  static CommandProfile chirp(double start, double f0, double f1, double sweep_time,
                              double amplitude);

  double position(double t) const;
  double velocity(double t) const;
};

/// Open-loop force added to the state-feedback output (identification runs).
struct ForceProfile {
  double constant = 0.0;
  std::vector<double> samples;  // held for `sample_period` each, then zero
  double sample_period = 0.0;

  double at(double t) const;
};

struct Scenario {
  CommandProfile command;
  ForceProfile feedforward;
  DisturbanceSchedule disturbance;
  PlantState initial;
};

struct Trajectory {
  std::vector<double> t, x_m, v_m, x_l, v_l, x_r, cmd, u_fb, f_hat, f_applied, dist_m, dist_l;
  bool diverged = false;
  double diverged_at = 0.0;

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
  PlantState state(std::size_t i) const { return {x_m[i], v_m[i], x_l[i], v_l[i]}; }
};

/// Hybrid simulation: RK4 plant with the discrete controller held by a ZOH.
Trajectory run_simulation(const PlantParams& plant, const ControllerConfig& ctrl,
                          const FeedbackGains& gains, const Scenario& scenario,
                          const SimConfig& sim);

/// Kinetic plus spring energy.
double energy(const PlantState& state, const PlantParams& params);

/// One fixed RK4 step of the plant with constant motor force.
PlantState rk4_step(const PlantState& state, double force, double t, double h,
                    const PlantParams& params, const DisturbanceSchedule& dist);

inline constexpr const char* kTrajectoryCsvHeader =
    "t,x_m,v_m,x_l,v_l,x_r,cmd,u_fb,F_hat,F_applied,dist_m,dist_l";

void write_csv(std::ostream& out, const Trajectory& traj);
/// Throws std::runtime_error when the file cannot be written.
void write_csv(const std::string& path, const Trajectory& traj);

/// Formats with 9 significant digits.
std::string format_number(double v);

}  // namespace rrc
