#include "rrc/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rrc {

MetricWindow step_window(double step_time, double height, double alpha) {
  MetricWindow w;
  w.reference_start = step_time;
  w.height = height;
  w.residual_start = step_time + 3.0 * kQuadruplePoleSettling / alpha;
  w.is_step = true;
  return w;
}

MetricWindow chirp_window(const CommandProfile& chirp) {
  MetricWindow w;
  w.reference_start = chirp.start;
  w.height = chirp.height;
  w.residual_start = chirp.start + chirp.sweep_time;
  w.rms_end = chirp.start + chirp.sweep_time;
  w.is_step = false;
  return w;
}

Metrics compute_metrics(const Trajectory& traj, const MetricWindow& window) {
  return compute_metrics(traj.t, traj.x_l, traj.cmd, window, traj.diverged);
}

Metrics compute_metrics(const std::vector<double>& t, const std::vector<double>& x_l,
                        const std::vector<double>& cmd, const MetricWindow& w, bool diverged) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Metrics m;
  m.diverged = diverged;
  if (diverged || t.empty()) {
    m.overshoot = inf;
    m.settling_time = std::numeric_limits<double>::quiet_NaN();
    m.settled = false;
    m.steady_state_error = inf;
    m.oscillation_index = inf;
    m.rms_tracking_error = inf;
    m.diverged = true;
    return m;
  }
  const double h = std::abs(w.height);
  const std::size_t n = t.size();

  double sum_sq = 0.0;
  std::size_t rms_count = 0;
  double lo = inf;
  double hi = -inf;
  double peak = -inf;
  std::size_t last_outside = n;  // index of last sample outside the 2% band
  for (std::size_t i = 0; i < n; ++i) {
    const double e = x_l[i] - cmd[i];
    const bool in_rms = t[i] >= w.reference_start && (w.is_step || t[i] <= w.rms_end);
    if (in_rms) {
      sum_sq += e * e;
      ++rms_count;
    }
    if (t[i] >= w.residual_start) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    if (w.is_step && t[i] >= w.reference_start) {
      peak = std::max(peak, std::copysign(1.0, w.height) * x_l[i]);
      if (std::abs(e) > 0.02 * h) last_outside = i;
    }
  }
  m.rms_tracking_error = rms_count ? std::sqrt(sum_sq / static_cast<double>(rms_count)) : 0.0;
  m.oscillation_index = (hi >= lo && h > 0.0) ? (hi - lo) / h : 0.0;

  // Mean error over the final 10% of the run.
  const std::size_t tail_begin = n - std::max<std::size_t>(1, n / 10);
  double tail = 0.0;
  for (std::size_t i = tail_begin; i < n; ++i) tail += x_l[i] - cmd[i];
  m.steady_state_error = std::abs(tail / static_cast<double>(n - tail_begin));

  if (w.is_step && h > 0.0) {
    m.overshoot = std::max(0.0, (peak - h) / h);
    if (last_outside == n) {
      m.settled = true;
      m.settling_time = 0.0;
    } else if (last_outside + 1 < n) {
      m.settled = true;
      m.settling_time = t[last_outside + 1] - w.reference_start;
    } else {
      m.settled = false;
      m.settling_time = std::numeric_limits<double>::quiet_NaN();
    }
  } else {
    m.overshoot = 0.0;
    m.settled = true;
    m.settling_time = 0.0;
  }
  return m;
}

FeedbackGains ControllerSetup::gains() const {
  return design_gains(config.variant, design_plant, config.ratio, config.alpha);
}

Job step_job(const PlantParams& plant, const ControllerSetup& ctrl, const StepSettings& step,
             const SimConfig& sim) {
  Job job;
  job.experiment = "step";
  job.condition = "nominal";
  job.plant = plant;
  job.controller = ctrl;
  job.scenario.command = CommandProfile::step(step.step_time, step.height);
  job.sim = sim;
  job.sim.duration = step.duration;
  job.window = step_window(step.step_time, step.height, ctrl.config.alpha);
  return job;
}

Job chirp_job(const PlantParams& plant, const ControllerSetup& ctrl, const ChirpSettings& chirp,
              const SimConfig& sim) {
  Job job;
  job.experiment = "chirp";
  job.condition = "nominal";
  job.plant = plant;
  job.controller = ctrl;
  job.scenario.command =
      CommandProfile::chirp(chirp.start, chirp.f0, chirp.f1, chirp.sweep_time, chirp.amplitude);
  job.sim = sim;
  job.sim.duration = chirp.start + chirp.sweep_time + chirp.tail;
  job.window = chirp_window(job.scenario.command);
  return job;
}

ExperimentResult run_job(const Job& job) {
  ExperimentResult r;
  r.experiment = job.experiment;
  r.condition = job.condition;
  r.variant = job.controller.config.variant;
  r.trajectory = run_simulation(job.plant, job.controller.config, job.controller.gains(),
                                job.scenario, job.sim);
  r.metrics = compute_metrics(r.trajectory, job.window);
  return r;
}

std::vector<ExperimentResult> run_jobs_serial(const std::vector<Job>& jobs) {
  std::vector<ExperimentResult> out;
  out.reserve(jobs.size());
  for (const auto& job : jobs) out.push_back(run_job(job));
  return out;
}

std::vector<ExperimentResult> run_jobs(const std::vector<Job>& jobs, int threads) {
  std::vector<ExperimentResult> out(jobs.size());
  const int n = static_cast<int>(jobs.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  // Exceptions cannot cross the parallel region; the first one is rethrown after it.
  std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = run_job(jobs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ExperimentResult step_experiment(const PlantParams& plant, const ControllerSetup& ctrl,
                                 const StepSettings& step, const SimConfig& sim) {
  return run_job(step_job(plant, ctrl, step, sim));
}

ExperimentResult chirp_experiment(const PlantParams& plant, const ControllerSetup& ctrl,
                                  const ChirpSettings& chirp, const SimConfig& sim) {
  return run_job(chirp_job(plant, ctrl, chirp, sim));
}

std::string condition_label(double multiplier) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "Mmn_x%g", multiplier);
  return buf;
}

std::vector<Job> mismatch_jobs(const PlantParams& plant,
                               const std::vector<ControllerSetup>& controllers,
                               const std::vector<double>& multipliers, const StepSettings& step,
                               const SimConfig& sim) {
  std::vector<Job> jobs;
  for (const auto& ctrl : controllers) {
    for (double mult : multipliers) {
      if (!(mult > 0.0)) throw std::invalid_argument("mismatch multipliers must be > 0");
      ControllerSetup c = ctrl;
      c.config.nominal_motor_mass = mult * ctrl.design_plant.motor_mass;
      Job job = step_job(plant, c, step, sim);
      job.experiment = "mismatch";
      job.condition = condition_label(mult);
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

std::vector<ExperimentResult> mismatch_sweep(const PlantParams& plant,
                                             const std::vector<ControllerSetup>& controllers,
                                             const std::vector<double>& multipliers,
                                             const StepSettings& step, const SimConfig& sim,
                                             int threads) {
  return run_jobs(mismatch_jobs(plant, controllers, multipliers, step, sim), threads);
}

std::vector<Job> load_weight_jobs(const PlantParams& loaded_plant,
                                  const std::vector<ControllerSetup>& controllers,
                                  const StepSettings& step, const SimConfig& sim) {
  std::vector<Job> jobs;
  for (const auto& ctrl : controllers) {
    Job job = step_job(loaded_plant, ctrl, step, sim);
    job.experiment = "load_weight";
    job.condition = "table2_plant";
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::vector<ExperimentResult> load_weight_experiment(
    const PlantParams& loaded_plant, const std::vector<ControllerSetup>& controllers,
    const StepSettings& step, const SimConfig& sim, int threads) {
  return run_jobs(load_weight_jobs(loaded_plant, controllers, step, sim), threads);
}

}  // namespace rrc
