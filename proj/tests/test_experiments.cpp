#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "rrc/experiments.hpp"

using namespace rrc;

namespace {

ControllerSetup proposed() { return {table4_controller(), table1_plant()}; }
ControllerSetup conventional() { return {table3_controller(), table1_plant()}; }

void same_trajectory(const Trajectory& a, const Trajectory& b) {
  CHECK(a.t == b.t);
  CHECK(a.x_m == b.x_m);
  CHECK(a.x_l == b.x_l);
  CHECK(a.f_applied == b.f_applied);
  CHECK(a.f_hat == b.f_hat);
  CHECK(a.diverged == b.diverged);
}

}  // namespace

TEST_CASE("settling constant of the quadruple pole") {
  CHECK(kQuadruplePoleSettling == doctest::Approx(oracle::quadruple_settling_x()).epsilon(1e-9));
}

TEST_CASE("metrics of the analytic quadruple-pole response") {
  const double alpha = 90.0, h = 5e-3, t0 = 0.1;
  std::vector<double> t, x, cmd;
  for (int k = 0; k <= 15000; ++k) {
    const double tk = k * 1e-4;
    t.push_back(tk);
    cmd.push_back(tk >= t0 ? h : 0.0);
    x.push_back(tk >= t0 ? h * oracle::quadruple_step(alpha, tk - t0) : 0.0);
  }
  const auto m = compute_metrics(t, x, cmd, step_window(t0, h, alpha));
  CHECK(m.overshoot == 0.0);
  CHECK(m.oscillation_index < 1e-8);
  CHECK(m.settled);
  CHECK(m.settling_time == doctest::Approx(oracle::quadruple_settling_x() / alpha).epsilon(2e-3));
  CHECK(m.steady_state_error < 1e-15);
  CHECK_FALSE(m.diverged);
}

TEST_CASE("metrics of a ringing response") {
  const double h = 1e-3;
  std::vector<double> t, x, cmd;
  for (int k = 0; k <= 10000; ++k) {
    const double tk = k * 1e-4;
    t.push_back(tk);
    cmd.push_back(h);
    x.push_back(h * (1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * 15.0 * tk)));
  }
  MetricWindow w = step_window(0.0, h, 90.0);
  const auto m = compute_metrics(t, x, cmd, w);
  CHECK(m.overshoot == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(m.oscillation_index == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(m.settled == false);
}

TEST_CASE("diverged runs score as infinite") {
  const auto m = compute_metrics({0.0}, {0.0}, {0.0}, step_window(0.1, 1e-3, 90.0), true);
  CHECK(m.diverged);
  CHECK(std::isinf(m.oscillation_index));
  CHECK(std::isinf(m.rms_tracking_error));
  CHECK_FALSE(m.settled);
}

TEST_CASE("nominal steps settle near the quadruple-pole time") {
  const double oracle_ts = oracle::quadruple_settling_x() / 90.0;
  for (const auto& ctrl : {proposed(), conventional()}) {
    const auto r = step_experiment(table1_plant(), ctrl);
    CHECK_FALSE(r.metrics.diverged);
    CHECK(r.metrics.overshoot < 0.01);
    CHECK(r.metrics.settling_time == doctest::Approx(oracle_ts).epsilon(0.1));
    CHECK(r.metrics.oscillation_index < kOscillationThreshold);
    CHECK(r.metrics.steady_state_error < 1e-6);
  }
}

TEST_CASE("parallel job runner matches the serial reference bit for bit") {
  std::vector<Job> jobs = mismatch_jobs(table1_plant(), {conventional(), proposed()},
                                        {0.5, 1.0, 1.5});
  for (auto& j : jobs) j.sim.duration = 0.4, j.window.residual_start = 0.35;
  jobs.push_back(chirp_job(table1_plant(), proposed(), {0.1, 1.0, 20.0, 0.5, 0.4e-3, 0.1}));
  const auto serial = run_jobs_serial(jobs);
  for (int threads : {1, 2, 4}) {
    const auto parallel = run_jobs(jobs, threads);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].experiment == serial[i].experiment);
      CHECK(parallel[i].condition == serial[i].condition);
      same_trajectory(parallel[i].trajectory, serial[i].trajectory);
      CHECK(parallel[i].metrics.oscillation_index == serial[i].metrics.oscillation_index);
    }
  }
}

TEST_CASE("job failures surface from the parallel runner") {
  Job bad = step_job(table1_plant(), proposed(), {});
  bad.sim.substeps = 0;
  CHECK_THROWS_AS(run_jobs({bad}, 2), std::invalid_argument);
}

TEST_CASE("mismatch sweep ordering and labels") {
  StepSettings step;
  step.duration = 0.3;
  const auto r = mismatch_sweep(table1_plant(), {conventional(), proposed()}, {0.5, 1.5}, step);
  REQUIRE(r.size() == 4);
  CHECK(r[0].variant == Variant::conventional_rrc);
  CHECK(r[0].condition == "Mmn_x0.5");
  CHECK(r[1].condition == "Mmn_x1.5");
  CHECK(r[2].variant == Variant::proposed_rrc);
  CHECK(r[3].experiment == "mismatch");
  CHECK_THROWS_AS(mismatch_sweep(table1_plant(), {proposed()}, {0.0}, step), std::invalid_argument);
}

TEST_CASE("overestimated motor mass hurts the conventional RRC more") {
  const auto r = mismatch_sweep(table1_plant(), {conventional(), proposed()}, {1.5});
  CHECK_FALSE(r[1].metrics.diverged);
  CHECK(r[0].metrics.oscillation_index > 3.0 * r[1].metrics.oscillation_index);
}

TEST_CASE("load weight keeps the design plant") {
  StepSettings step;
  step.duration = 0.5;
  const auto r = load_weight_experiment(table2_plant(), {proposed()}, step);
  REQUIRE(r.size() == 1);
  CHECK(r[0].condition == "table2_plant");
  CHECK_FALSE(r[0].metrics.diverged);
}

TEST_CASE("chirp metrics") {
  ChirpSettings c;
  c.sweep_time = 2.0;
  c.f1 = 10.0;
  const auto r = chirp_experiment(table1_plant(), proposed(), c);
  CHECK(r.experiment == "chirp");
  CHECK(r.trajectory.t.back() == doctest::Approx(c.start + c.sweep_time + c.tail));
  CHECK(r.metrics.rms_tracking_error > 0.0);
  CHECK(r.metrics.rms_tracking_error < c.amplitude);
  CHECK(r.metrics.overshoot == 0.0);
}
