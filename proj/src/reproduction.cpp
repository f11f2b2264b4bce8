#include "rrc/reproduction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rrc {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

double rel_err(double value, double target) { return std::abs(value - target) / std::abs(target); }

ControllerSetup conventional_setup() { return {table3_controller(), table1_plant()}; }
ControllerSetup proposed_setup() { return {table4_controller(), table1_plant()}; }

const ExperimentResult& find(const std::vector<ExperimentResult>& results,
                             const std::string& experiment, Variant v,
                             const std::string& condition) {
  for (const auto& r : results) {
    if (r.experiment == experiment && r.variant == v && r.condition == condition) return r;
  }
  throw std::logic_error("missing run " + experiment + "/" + to_string(v) + "/" + condition);
}

std::string chirp_condition(double mult) { return condition_label(mult); }

std::vector<Job> step_nominal_jobs(const SuiteSettings& s) {
  return {step_job(table1_plant(), conventional_setup(), s.step, s.sim),
          step_job(table1_plant(), proposed_setup(), s.step, s.sim)};
}

std::vector<Job> chirp_jobs(const SuiteSettings& s) {
  std::vector<Job> jobs;
  for (const auto& ctrl : {conventional_setup(), proposed_setup()}) {
    for (double mult : s.chirp_multipliers) {
      ControllerSetup c = ctrl;
      c.config.nominal_motor_mass = mult * ctrl.design_plant.motor_mass;
      Job job = chirp_job(table1_plant(), c, s.chirp, s.sim);
      job.condition = chirp_condition(mult);
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

std::string dob_condition(const SuiteSettings& s) { return fmt("g_d_%g", s.high_dob_cutoff); }

std::vector<Job> dob_jobs(const SuiteSettings& s) {
  std::vector<Job> jobs;
  for (auto ctrl : {conventional_setup(), proposed_setup()}) {
    ctrl.config.dob_cutoff = s.high_dob_cutoff;
    Job job = step_job(table1_plant(), ctrl, s.step, s.sim);
    job.experiment = "dob_gain";
    job.condition = dob_condition(s);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

void append(std::vector<Job>& to, std::vector<Job> from) {
  for (auto& j : from) to.push_back(std::move(j));
}

struct Draw {
  PlantParams plant;
  double ratio;
  double alpha;
};

Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
  Draw d;
  d.plant.motor_mass = log_uniform(0.1, 10.0);
  d.plant.load_mass = log_uniform(0.1, 10.0);
  d.plant.spring_coeff = log_uniform(1e2, 1e5);
  const double bound = d.plant.motor_mass / d.plant.total_mass();
  d.ratio = bound + log_uniform(0.05, 8.0);
  const double wp = characteristic_freqs(d.plant).omega_p;
  d.alpha = log_uniform(0.3, 3.0) * std::sqrt(d.ratio) * wp;
  return d;
}

double coeff_error(const ClosedLoopCoeffs& c, double alpha) {
  const double a2 = alpha * alpha;
  return std::max({rel_err(c.a3, 4.0 * alpha), rel_err(c.a2, 6.0 * a2),
                   rel_err(c.a1, 4.0 * a2 * alpha), rel_err(c.a0, a2 * a2)});
}

double pole_error(const PlantParams& p, double ratio, double alpha) {
  const auto g = quadruple_pole_gains(p, ratio, alpha);
  double err = coeff_error(closed_loop_coeffs(p, ratio, g), alpha);
  // The conventional design places the same poles on its own loop.
  PlantParams light = p;
  light.motor_mass = p.motor_mass / ratio;
  const auto gc = design_gains(Variant::conventional_rrc, p, ratio, alpha);
  err = std::max(err, coeff_error(closed_loop_coeffs(light, 1.0, gc), alpha));
  return err;
}

CriterionResult p1() {
  const auto f1 = characteristic_freqs(table1_plant());
  const auto f2 = characteristic_freqs(table2_plant());
  const double err = std::max({rel_err(f1.f_p, 14.4), rel_err(f1.f_z, 10.4), rel_err(f2.f_p, 13.3),
                               rel_err(f2.f_z, 8.85)});
  return {"P1", "", err < kFrequencyTolerance,
          fmt("table1 f_p=%.4f f_z=%.4f, table2 f_p=%.4f f_z=%.4f Hz, max rel err %.3g (< %g)",
              f1.f_p, f1.f_z, f2.f_p, f2.f_z, err, kFrequencyTolerance)};
}

CriterionResult p2() {
  const auto m = modified_params(table1_plant(), 2.62);
  const auto c = conventional_modified_params(table1_plant(), 4.40);
  const double mass_err = std::max(
      {rel_err(m.motor_mass, 0.458), rel_err(m.load_mass, 1.83), rel_err(m.spring_coeff, 7836.0)});
  const double f_err = std::max(rel_err(m.f_p(), 23.3), rel_err(c.f_p(), 23.3));
  return {"P2", "", mass_err < kModifiedParamTolerance && f_err < kFrequencyTolerance,
          fmt("M'm=%.4f M'l=%.4f K's=%.1f (rel err %.3g < %g); f'p=%.3f/%.3f Hz (rel err %.3g < "
              "%g)",
              m.motor_mass, m.load_mass, m.spring_coeff, mass_err, kModifiedParamTolerance,
              m.f_p(), c.f_p(), f_err, kFrequencyTolerance)};
}

CriterionResult p3(const SuiteSettings& s) {
  double worst = pole_error(table1_plant(), table4_controller().ratio, table4_controller().alpha);
  std::mt19937_64 rng(s.seed);
  for (int i = 0; i < s.random_designs; ++i) {
    const Draw d = random_draw(rng);
    worst = std::max(worst, pole_error(d.plant, d.ratio, d.alpha));
  }
  return {"P3", "", worst < kPolePlacementTolerance,
          fmt("table1/table4 + %d random designs: max coefficient rel err %.3g (< %g)",
              s.random_designs, worst, kPolePlacementTolerance)};
}

CriterionResult p4(const SuiteSettings& s) {
  std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double mass = 0.0, ratio = 0.0, pole = 0.0, transfer = 0.0;
  for (int i = 0; i < s.invariant_draws; ++i) {
    const Draw d = random_draw(rng);
    const auto& p = d.plant;
    const auto m = modified_params(p, d.ratio);
    const double wp = characteristic_freqs(p).omega_p;
    mass = std::max(mass, rel_err(m.motor_mass + m.load_mass, p.total_mass()));
    ratio = std::max(ratio, rel_err(m.spring_coeff / m.load_mass, p.spring_coeff / p.load_mass));
    pole = std::max(pole, rel_err(m.omega_p, std::sqrt(d.ratio) * wp));
    double w = wp * std::pow(10.0, 2.0 * u(rng) - 1.0);
    if (std::abs(w / wp - 1.0) < 0.01) w *= 1.05;
    const auto gm = frequency_response(p, Channel::motor, w);
    const auto gl = frequency_response(p, Channel::load, w);
    const auto gr = frequency_response(p, Channel::relative, w);
    const double scale = std::max({std::abs(gm), std::abs(gl), std::abs(gr)});
    transfer = std::max(transfer, std::abs(gm - gl - gr) / scale);
  }
  const double worst = std::max({mass, ratio, pole, transfer});
  return {"P4", "", worst < kInvariantTolerance,
          fmt("%d draws: mass %.3g, Ks/Ml %.3g, w'p %.3g, transfer %.3g (each < %g)",
              s.invariant_draws, mass, ratio, pole, transfer, kInvariantTolerance)};
}

CriterionResult p5(const SuiteSettings& s, const std::vector<ExperimentResult>& results) {
  const auto& conv = find(results, "step", Variant::conventional_rrc, "nominal");
  const auto& prop = find(results, "step", Variant::proposed_rrc, "nominal");
  double diff = 0.0;
  const std::size_t n = std::min(conv.trajectory.size(), prop.trajectory.size());
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::abs(conv.trajectory.x_l[i] - prop.trajectory.x_l[i]));
  }
  const double parity = diff / std::abs(s.step.height);
  const double oracle = kQuadruplePoleSettling / table4_controller().alpha;
  auto settle_ok = [&](const Metrics& m) {
    return m.settled && std::abs(m.settling_time / oracle - 1.0) <= kSettlingTolerance;
  };
  const bool ok = parity < kParityLimit && conv.metrics.overshoot < kOvershootLimit &&
                  prop.metrics.overshoot < kOvershootLimit && settle_ok(conv.metrics) &&
                  settle_ok(prop.metrics) && !conv.metrics.diverged && !prop.metrics.diverged;
  return {"P5", "", ok,
          fmt("parity %.4f (< %g); overshoot conv %.4f prop %.4f (< %g); settling conv %.4f prop "
              "%.4f s vs oracle %.4f s (+-%g)",
              parity, kParityLimit, conv.metrics.overshoot, prop.metrics.overshoot,
              kOvershootLimit, conv.metrics.settling_time, prop.metrics.settling_time, oracle,
              kSettlingTolerance)};
}

bool stable(const Metrics& m) {
  return !m.diverged && m.oscillation_index < kOscillationThreshold;
}

CriterionResult p6(const std::vector<ExperimentResult>& results) {
  const auto hi = condition_label(1.5);
  const auto lo = condition_label(0.5);
  const auto& conv_hi = find(results, "mismatch", Variant::conventional_rrc, hi).metrics;
  const auto& prop_hi = find(results, "mismatch", Variant::proposed_rrc, hi).metrics;
  const auto& conv_lo = find(results, "mismatch", Variant::conventional_rrc, lo).metrics;
  const auto& prop_lo = find(results, "mismatch", Variant::proposed_rrc, lo).metrics;
  const double ratio = conv_hi.oscillation_index / prop_hi.oscillation_index;
  const bool ok = ratio >= kMismatchFactor && !prop_hi.diverged && stable(conv_lo) &&
                  stable(prop_lo);
  return {"P6", "", ok,
          fmt("1.5x osc conv %.3g prop %.3g ratio %.3g (>= %g); 0.5x osc conv %.3g prop %.3g "
              "(< %g)",
              conv_hi.oscillation_index, prop_hi.oscillation_index, ratio, kMismatchFactor,
              conv_lo.oscillation_index, prop_lo.oscillation_index, kOscillationThreshold)};
}

CriterionResult p7(const SuiteSettings& s, const std::vector<ExperimentResult>& results) {
  bool ok = true;
  std::string detail;
  for (double mult : s.chirp_multipliers) {
    const auto cond = chirp_condition(mult);
    const auto& conv = find(results, "chirp", Variant::conventional_rrc, cond).metrics;
    const auto& prop = find(results, "chirp", Variant::proposed_rrc, cond).metrics;
    const bool expect_failure = mult > 1.25;
    ok = ok && !prop.diverged && conv.diverged == expect_failure;
    detail += fmt("%s%s conv %s prop %s", detail.empty() ? "" : "; ", cond.c_str(),
                  conv.diverged ? "diverged" : "bounded", prop.diverged ? "diverged" : "bounded");
  }
  return {"P7", "", ok, detail + " (conventional must diverge above 1.25x only)"};
}

CriterionResult p8(const SuiteSettings& s, const std::vector<ExperimentResult>& results) {
  const auto cond = dob_condition(s);
  const auto& base = find(results, "step", Variant::conventional_rrc, "nominal").metrics;
  const auto& conv = find(results, "dob_gain", Variant::conventional_rrc, cond).metrics;
  const auto& prop = find(results, "dob_gain", Variant::proposed_rrc, cond).metrics;
  const double ratio = conv.oscillation_index / base.oscillation_index;
  const bool ok = stable(prop) && (conv.diverged || ratio >= kDobDegradationFactor);
  return {"P8", "", ok,
          fmt("g_d=%g: prop osc %.3g (< %g); conv osc %.3g vs %.3g at g_d=%g, ratio %.3g (>= %g "
              "or diverged), conv diverged %s",
              s.high_dob_cutoff, prop.oscillation_index, kOscillationThreshold,
              conv.oscillation_index, base.oscillation_index, table3_controller().dob_cutoff,
              ratio, kDobDegradationFactor, conv.diverged ? "yes" : "no")};
}

IdentificationSettings identification_settings(const SuiteSettings& s) {
  IdentificationSettings id = s.identify;
  id.seed = s.seed;
  return id;
}

CriterionResult p9(const SuiteSettings& s, const IdentificationResult* given) {
  IdentificationResult local;
  if (!given) {
    local = identify_plant(table1_plant(), identification_settings(s));
    given = &local;
  }
  const auto& est = given->fit.params;
  const auto truth = table1_plant();
  const double em = rel_err(est.motor_mass, truth.motor_mass);
  const double el = rel_err(est.load_mass, truth.load_mass);
  const double ek = rel_err(est.spring_coeff, truth.spring_coeff);
  const double worst = std::max({em, el, ek});
  return {"P9", "", worst < kIdentificationTolerance,
          fmt("Mm=%.4f Ml=%.4f Ks=%.1f, rel err %.3g/%.3g/%.3g (< %g)", est.motor_mass,
              est.load_mass, est.spring_coeff, em, el, ek, kIdentificationTolerance)};
}

struct FreeRun {
  double error = 0.0;  // |x_r(1 s) - analytic|
  double drift = 0.0;  // max relative energy change
};

FreeRun free_oscillation(const PlantParams& p, double h, double duration) {
  const double x0 = 1e-3;
  const double wp = characteristic_freqs(p).omega_p;
  PlantState s{p.load_mass / p.total_mass() * x0, 0.0, -p.motor_mass / p.total_mass() * x0, 0.0};
  const double e0 = energy(s, p);
  const DisturbanceSchedule none;
  const auto n = static_cast<long>(std::llround(duration / h));
  FreeRun r;
  for (long i = 0; i < n; ++i) {
    s = rk4_step(s, 0.0, static_cast<double>(i) * h, h, p, none);
    r.drift = std::max(r.drift, std::abs(energy(s, p) - e0) / e0);
  }
  r.error = std::abs(s.relative_position() - x0 * std::cos(wp * static_cast<double>(n) * h));
  return r;
}

CriterionResult p10(const SuiteSettings& s) {
  const auto p = table1_plant();
  const double ts = s.sim.control_period;
  const double drift = free_oscillation(p, ts / s.sim.substeps, 1.0).drift;
  const double e1 = free_oscillation(p, ts, 1.0).error;
  const double e2 = free_oscillation(p, ts / 2.0, 1.0).error;
  const double e4 = free_oscillation(p, ts / 4.0, 1.0).error;
  const double r1 = e1 / e2;
  const double r2 = e2 / e4;
  auto in_range = [](double r) { return r >= kConvergenceRatioLow && r <= kConvergenceRatioHigh; };
  return {"P10", "", drift < kEnergyDriftLimit && in_range(r1) && in_range(r2),
          fmt("energy drift %.3g (< %g) at %d substeps; halving ratios %.3f, %.3f (in [%g, %g])",
              drift, kEnergyDriftLimit, s.sim.substeps, r1, r2, kConvergenceRatioLow,
              kConvergenceRatioHigh)};
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {"P1", "characteristic frequencies of the two plants", 1e-3},
      {"P2", "modified system of the relative-position RRC", 1e-3},
      {"P3", "quadruple pole placement", 0.1},
      {"P4", "modified-system and transfer-function invariants", 1.0},
      {"P5", "nominal step parity", 10.0},
      {"P6", "robustness to motor mass mismatch", 30.0},
      {"P7", "chirp failure of the conventional RRC", 60.0},
      {"P8", "DOB gain headroom", 30.0},
      {"P9", "identification round trip", 30.0},
      {"P10", "RK4 numerics", 5.0},
  };
  return list;
}

std::vector<Job> suite_jobs(const SuiteSettings& s, const std::string& id) {
  std::vector<Job> jobs;
  const std::vector<ControllerSetup> both{conventional_setup(), proposed_setup()};
  const bool all = id.empty();
  if (all || id == "P5" || id == "P8") append(jobs, step_nominal_jobs(s));
  if (all || id == "P6") {
    append(jobs, mismatch_jobs(table1_plant(), both, s.step_multipliers, s.step, s.sim));
  }
  if (all) append(jobs, load_weight_jobs(table2_plant(), both, s.step, s.sim));
  if (all || id == "P7") append(jobs, chirp_jobs(s));
  if (all || id == "P8") append(jobs, dob_jobs(s));
  return jobs;
}

CriterionResult evaluate_criterion(const std::string& id, const SuiteSettings& s,
                                   const std::vector<ExperimentResult>& results,
                                   const IdentificationResult* identification) {
  CriterionResult r;
  if (id == "P1") r = p1();
  else if (id == "P2") r = p2();
  else if (id == "P3") r = p3(s);
  else if (id == "P4") r = p4(s);
  else if (id == "P5") r = p5(s, results);
  else if (id == "P6") r = p6(results);
  else if (id == "P7") r = p7(s, results);
  else if (id == "P8") r = p8(s, results);
  else if (id == "P9") r = p9(s, identification);
  else if (id == "P10") r = p10(s);
  else throw std::invalid_argument("unknown acceptance criterion '" + id + "'");
  for (const auto& c : acceptance_criteria()) {
    if (c.id == id) r.title = c.title;
  }
  return r;
}

CriterionResult check_criterion(const std::string& id, const SuiteSettings& s) {
  const auto jobs = suite_jobs(s, id);
  const auto results = jobs.empty() ? std::vector<ExperimentResult>{} : run_jobs(jobs, s.threads);
  return evaluate_criterion(id, s, results);
}

SuiteRun run_suite(const SuiteSettings& s) {
  SuiteRun run;
  run.results = run_jobs(suite_jobs(s), s.threads);
  run.identification = identify_plant(table1_plant(), identification_settings(s));
  for (const auto& c : acceptance_criteria()) {
    run.criteria.push_back(evaluate_criterion(c.id, s, run.results, &run.identification));
  }
  return run;
}

void write_suite_outputs(const SuiteRun& run, const std::string& out_dir) {
  make_directories(out_dir);
  const std::string root = out_dir + "/";
  for (const auto& r : run.results) write_trajectory(root + trajectory_path(r), r.trajectory);
  write_text_file(root + "synthesis/table3.json",
                  synthesis_json(synthesize(table1_plant(), table3_controller())));
  write_text_file(root + "synthesis/table4.json",
                  synthesis_json(synthesize(table1_plant(), table4_controller())));
  write_text_file(root + "synthesis/bode_table1.csv", bode_csv(table1_plant()));
  write_text_file(root + "synthesis/bode_table2.csv", bode_csv(table2_plant()));
  write_text_file(root + "identify/estimate.json",
                  identification_json(run.identification, table1_plant()));
  write_text_file(root + "identify/frf.csv", frf_csv(run.identification.frf));
  write_text_file(root + "summary.json", summary_json(run.results, run.criteria));
}

}  // namespace rrc
