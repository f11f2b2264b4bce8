#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "rrc/config.hpp"
#include "rrc/report.hpp"
#include "rrc/reproduction.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string config;
  std::string out;
  int jobs = 0;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

rrc::RunConfig load(const Options& o) {
  if (o.config.empty()) throw rrc::ConfigError("--config", "a config file is required");
  return rrc::load_config(o.config);
}

int threads(const Options& o) { return o.jobs > 0 ? o.jobs : omp_get_num_procs(); }

std::string out_dir(const Options& o, const char* fallback) {
  return o.out.empty() ? std::string(fallback) : o.out;
}

int cmd_synthesize(const Options& o) {
  const auto cfg = load(o);
  cfg.require(true, true, false);
  const auto report = rrc::synthesize(cfg.design_plant, cfg.controller);
  std::cout << (o.json ? rrc::synthesis_json(report) : rrc::synthesis_text(report));
  if (!o.out.empty()) {
    rrc::write_text_file(o.out + "/synthesis.json", rrc::synthesis_json(report));
    rrc::write_text_file(o.out + "/bode.csv", rrc::bode_csv(cfg.design_plant));
  }
  return 0;
}

rrc::Job scenario_job(const rrc::RunConfig& cfg, const rrc::ControllerSetup& ctrl) {
  const auto& sc = cfg.scenario;
  rrc::Job job;
  switch (sc.kind) {
    case rrc::ScenarioKind::step:
      job = rrc::step_job(cfg.plant, ctrl, sc.step, cfg.sim);
      break;
    case rrc::ScenarioKind::chirp:
      job = rrc::chirp_job(cfg.plant, ctrl, sc.chirp, cfg.sim);
      break;
    case rrc::ScenarioKind::free: {
      job.experiment = "free";
      job.condition = "nominal";
      job.plant = cfg.plant;
      job.controller = ctrl;
      const double M = cfg.plant.total_mass();
      job.scenario.initial = {cfg.plant.load_mass / M * sc.initial_relative, 0.0,
                              -cfg.plant.motor_mass / M * sc.initial_relative, 0.0};
      job.sim = cfg.sim;
      job.sim.duration = sc.free_duration;
      job.window = rrc::step_window(0.0, sc.initial_relative, ctrl.config.alpha);
      break;
    }
    case rrc::ScenarioKind::identify:
      throw rrc::ConfigError("scenario.kind",
                             "identify scenarios run through the identify subcommand");
  }
  job.scenario.disturbance = sc.disturbance;
  return job;
}

void print_metrics(const rrc::ExperimentResult& r) {
  const auto& m = r.metrics;
  std::printf("%-12s %-20s %-14s overshoot %s osc %s rms %s diverged %s\n", r.experiment.c_str(),
              rrc::to_string(r.variant), r.condition.c_str(),
              rrc::format_number(m.overshoot).c_str(),
              rrc::format_number(m.oscillation_index).c_str(),
              rrc::format_number(m.rms_tracking_error).c_str(), m.diverged ? "yes" : "no");
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  cfg.require(true, true, true);
  auto job = scenario_job(cfg, cfg.controller_setup());
  job.condition =
      rrc::condition_label(cfg.controller.nominal_motor_mass / cfg.design_plant.motor_mass);
  const auto result = rrc::run_job(job);
  const auto dir = out_dir(o, "rrc_out/run");
  rrc::write_trajectory(dir + "/trajectory.csv", result.trajectory);
  rrc::write_text_file(dir + "/metrics.json", rrc::summary_json({result}));
  print_metrics(result);
  return 0;
}

int cmd_identify(const Options& o) {
  const auto cfg = load(o);
  cfg.require(true, false, false);
  auto settings = cfg.scenario.identify;
  if (o.seed) settings.seed = *o.seed;
  const auto result = rrc::identify_plant(cfg.plant, settings);
  const auto dir = out_dir(o, "rrc_out/identify");
  const auto json = rrc::identification_json(result, cfg.plant);
  rrc::write_text_file(dir + "/estimate.json", json);
  rrc::write_text_file(dir + "/frf.csv", rrc::frf_csv(result.frf));
  std::cout << json;
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto cfg = load(o);
  cfg.require(true, true, true);
  const auto base = cfg.controller_setup();
  std::vector<rrc::Job> jobs;
  for (double mult : cfg.scenario.multipliers) {
    auto ctrl = base;
    ctrl.config.nominal_motor_mass = mult * base.design_plant.motor_mass;
    auto job = scenario_job(cfg, ctrl);
    job.condition = rrc::condition_label(mult);
    jobs.push_back(std::move(job));
  }
  const auto results = rrc::run_jobs(jobs, threads(o));
  const auto dir = out_dir(o, "rrc_out/sweep");
  for (const auto& r : results) {
    rrc::write_trajectory(dir + "/" + rrc::trajectory_path(r), r.trajectory);
    print_metrics(r);
  }
  rrc::write_text_file(dir + "/summary.json", rrc::summary_json(results));
  return 0;
}

int cmd_reproduce(const Options& o) {
  rrc::SuiteSettings s;
  if (!o.config.empty()) {
    const auto cfg = load(o);
    s.sim = cfg.sim;
    if (cfg.has_scenario) {
      s.step = cfg.scenario.step;
      s.chirp = cfg.scenario.chirp;
      s.identify = cfg.scenario.identify;
    }
  }
  if (o.seed) s.seed = *o.seed;
  s.threads = threads(o);
  const auto run = rrc::run_suite(s);
  const auto dir = out_dir(o, "reproduction_out");
  rrc::write_suite_outputs(run, dir);
  for (const auto& r : run.results) print_metrics(r);
  for (const auto& c : run.criteria) {
    std::printf("%-4s %s  %s: %s\n", c.id.c_str(), c.passed ? "PASS" : "FAIL", c.title.c_str(),
                c.detail.c_str());
  }
  std::printf("outputs written to %s\n", dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance ratio control for two-inertia systems"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI or JSON configuration file");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--jobs", o.jobs, "parallel simulations (default: logical cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "random seed (PRBS register, random draws)");
  };
  auto* synth = app.add_subcommand("synthesize", "modified system, gains and stability");
  synth->add_flag("--json", o.json, "print JSON instead of the table");
  auto* run = app.add_subcommand("run", "simulate one scenario");
  auto* ident = app.add_subcommand("identify", "PRBS identification of the configured plant");
  auto* sweep = app.add_subcommand("sweep", "scenario over the M_mn multipliers");
  auto* repro = app.add_subcommand("reproduce-paper", "full experiment suite and acceptance checks");
  for (auto* sub : {synth, run, ident, sweep, repro}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*synth) return cmd_synthesize(o);
    if (*run) return cmd_run(o);
    if (*ident) return cmd_identify(o);
    if (*sweep) return cmd_sweep(o);
    return cmd_reproduce(o);
  } catch (const rrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rrc::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
