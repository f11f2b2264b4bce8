#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rrc/experiments.hpp"
#include "rrc/identification.hpp"
#include "rrc/report.hpp"

namespace rrc {

// Pinned acceptance tolerances.
inline constexpr double kFrequencyTolerance = 0.005;
inline constexpr double kModifiedParamTolerance = 0.01;
inline constexpr double kPolePlacementTolerance = 1e-9;
inline constexpr double kInvariantTolerance = 1e-12;
inline constexpr double kParityLimit = 0.02;
inline constexpr double kOvershootLimit = 0.01;
inline constexpr double kSettlingTolerance = 0.10;
inline constexpr double kMismatchFactor = 3.0;
inline constexpr double kDobDegradationFactor = 5.0;
inline constexpr double kIdentificationTolerance = 0.05;
inline constexpr double kEnergyDriftLimit = 1e-8;
inline constexpr double kConvergenceRatioLow = 14.0;
inline constexpr double kConvergenceRatioHigh = 18.0;

struct Criterion {
  std::string id;
  std::string title;
  double budget = 0.0;  // wall-clock seconds
};

/// P1..P10 in order.
const std::vector<Criterion>& acceptance_criteria();

struct SuiteSettings {
  StepSettings step;
  ChirpSettings chirp;
  SimConfig sim;
  std::vector<double> step_multipliers{0.5, 1.5};
  std::vector<double> chirp_multipliers{0.5, 1.0, 1.5};
  double high_dob_cutoff = 500.0;  // [rad/s]
  IdentificationSettings identify;
  std::uint64_t seed = 1;  // random draws in P3/P4 and the PRBS register
  int threads = 0;
  int random_designs = 100;
  int invariant_draws = 1000;
};

/// Simulations a criterion needs; an empty id selects every simulation.
std::vector<Job> suite_jobs(const SuiteSettings& s, const std::string& id = "");

/// Scores one criterion. Simulation criteria read their runs out of
/// `results`; P9 uses `identification` when given and runs it otherwise.
CriterionResult evaluate_criterion(const std::string& id, const SuiteSettings& s,
                                   const std::vector<ExperimentResult>& results = {},
                                   const IdentificationResult* identification = nullptr);

/// Runs what the criterion needs and scores it.
CriterionResult check_criterion(const std::string& id, const SuiteSettings& s);

struct SuiteRun {
  std::vector<ExperimentResult> results;
  IdentificationResult identification;
  std::vector<CriterionResult> criteria;
};

SuiteRun run_suite(const SuiteSettings& s);

/// Trajectory CSVs, synthesis reports, Bode data, identification output and
/// summary.json under `out_dir`.
void write_suite_outputs(const SuiteRun& run, const std::string& out_dir);

}  // namespace rrc
