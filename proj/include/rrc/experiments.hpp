#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrc/controllers.hpp"
#include "rrc/plant.hpp"
#include "rrc/sim.hpp"
#include "rrc/synthesis.hpp"

namespace rrc {

/// e^{-x}(1 + x + x^2/2 + x^3/6) = 0.02 for the (s+a)^4 step response;
/// the 2% settling time is this value divided by the pole.
inline constexpr double kQuadruplePoleSettling = 9.084115382;

/// Peak-to-peak residual (fraction of step height) treated as visible oscillation.
inline constexpr double kOscillationThreshold = 0.01;

struct Metrics {
  double overshoot = 0.0;           // fraction of step height
  double settling_time = 0.0;       // 2% band, measured from the step; NaN if unsettled
  bool settled = false;
  double steady_state_error = 0.0;  // [m]
  double oscillation_index = 0.0;   // peak-to-peak residual / height, +inf if diverged
  double rms_tracking_error = 0.0;  // [m]
  bool diverged = false;
};

/// How a trajectory is scored.
struct MetricWindow {
  double reference_start = 0.1;  // step time or chirp start [s]
  double height = 0.005;         // step height or chirp amplitude [m]
  double residual_start = 0.0;   // oscillation window start [s]
  bool is_step = true;
  double rms_end = 0.0;          // chirp end; ignored for steps
};

MetricWindow step_window(double step_time, double height, double alpha);
MetricWindow chirp_window(const CommandProfile& chirp);

/// Metrics of load position against the command column.
Metrics compute_metrics(const Trajectory& traj, const MetricWindow& window);
/// Same, over raw columns (used for analytic trajectories).
Metrics compute_metrics(const std::vector<double>& t, const std::vector<double>& x_l,
                        const std::vector<double>& cmd, const MetricWindow& window,
                        bool diverged = false);

/// Controller together with the plant its gains were designed for.
struct ControllerSetup {
  ControllerConfig config;
  PlantParams design_plant;

  FeedbackGains gains() const;
};

struct StepSettings {
  double step_time = 0.1;
  double height = 0.005;
  double duration = 1.5;

  bool operator==(const StepSettings&) const = default;
};

struct ChirpSettings {
  double start = 0.1;
  double f0 = 0.5;
  double f1 = 30.0;
  double sweep_time = 10.0;
  double amplitude = 0.4e-3;
  double tail = 0.5;  // simulated time after the sweep

  bool operator==(const ChirpSettings&) const = default;
};

struct ExperimentResult {
  std::string experiment;
  std::string condition;
  Variant variant = Variant::proposed_rrc;
  Trajectory trajectory;
  Metrics metrics;
};

/// A fully specified simulation plus how to score it. Jobs are independent.
struct Job {
  std::string experiment;
  std::string condition;
  PlantParams plant;
  ControllerSetup controller;
  Scenario scenario;
  SimConfig sim;
  MetricWindow window;
};

Job step_job(const PlantParams& plant, const ControllerSetup& ctrl, const StepSettings& step,
             const SimConfig& sim = {});
Job chirp_job(const PlantParams& plant, const ControllerSetup& ctrl, const ChirpSettings& chirp,
              const SimConfig& sim = {});

ExperimentResult run_job(const Job& job);

/// Serial reference: runs jobs one after another in order.
std::vector<ExperimentResult> run_jobs_serial(const std::vector<Job>& jobs);
/// OpenMP fan-out over jobs; results are returned in job order and are
/// bit-identical to run_jobs_serial. `threads` <= 0 uses the OpenMP default.
std::vector<ExperimentResult> run_jobs(const std::vector<Job>& jobs, int threads = 0);

ExperimentResult step_experiment(const PlantParams& plant, const ControllerSetup& ctrl,
                                 const StepSettings& step = {}, const SimConfig& sim = {});

ExperimentResult chirp_experiment(const PlantParams& plant, const ControllerSetup& ctrl,
                                  const ChirpSettings& chirp = {}, const SimConfig& sim = {});

std::vector<Job> mismatch_jobs(const PlantParams& plant,
                               const std::vector<ControllerSetup>& controllers,
                               const std::vector<double>& multipliers,
                               const StepSettings& step = {}, const SimConfig& sim = {});
std::vector<Job> load_weight_jobs(const PlantParams& loaded_plant,
                                  const std::vector<ControllerSetup>& controllers,
                                  const StepSettings& step = {}, const SimConfig& sim = {});

/// Step experiment for each controller with M_mn = multiplier * design Mm.
/// Results are ordered controller-major, multiplier-minor.
std::vector<ExperimentResult> mismatch_sweep(const PlantParams& plant,
                                             const std::vector<ControllerSetup>& controllers,
                                             const std::vector<double>& multipliers,
                                             const StepSettings& step = {},
                                             const SimConfig& sim = {}, int threads = 0);

/// Controllers keep their design plant (gains and M_mn) while the simulated plant changes.
std::vector<ExperimentResult> load_weight_experiment(
    const PlantParams& loaded_plant, const std::vector<ControllerSetup>& controllers,
    const StepSettings& step = {}, const SimConfig& sim = {}, int threads = 0);

std::string condition_label(double multiplier);

}  // namespace rrc
