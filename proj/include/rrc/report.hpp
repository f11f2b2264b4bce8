#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrc/controllers.hpp"
#include "rrc/experiments.hpp"
#include "rrc/identification.hpp"
#include "rrc/plant.hpp"
#include "rrc/synthesis.hpp"

namespace rrc {

/// Output file or directory could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthesisReport {
  PlantParams plant;
  CharacteristicFreqs freqs;
  ControllerConfig controller;
  ModifiedParams modified;
  FeedbackGains gains;
  ClosedLoopCoeffs coeffs;  // of the loop the variant actually forms
  bool stable = false;
  std::optional<std::string> warning;
};

/// Throws std::invalid_argument (from modified_params) for an RRC ratio at
/// or below Mm/(Mm+Ml).
SynthesisReport synthesize(const PlantParams& design_plant, const ControllerConfig& ctrl);

std::string synthesis_text(const SynthesisReport& r);
std::string synthesis_json(const SynthesisReport& r);

/// Open-loop plant responses, log-spaced in [f_lo, f_hi] Hz. Magnitude in m/N,
/// phase in degrees. Points that land on the resonance are skipped.
std::string bode_csv(const PlantParams& plant, double f_lo = 1.0, double f_hi = 100.0,
                     int points = 400);

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Metrics keyed experiment -> variant -> condition, plus criteria verdicts
/// when given. Numbers carry 9 significant digits; non-finite values are null.
std::string summary_json(const std::vector<ExperimentResult>& results,
                         const std::vector<CriterionResult>& criteria = {});

std::string identification_json(const IdentificationResult& r,
                                 const std::optional<PlantParams>& truth = std::nullopt);
std::string frf_csv(const PlantFrf& frf);

/// "<experiment>/<variant>_<condition>.csv"
std::string trajectory_path(const ExperimentResult& r);

void make_directories(const std::string& dir);
void write_text_file(const std::string& path, const std::string& text);
void write_trajectory(const std::string& path, const Trajectory& traj);

}  // namespace rrc
