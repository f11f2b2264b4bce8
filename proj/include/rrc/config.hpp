#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrc/controllers.hpp"
#include "rrc/experiments.hpp"
#include "rrc/identification.hpp"
#include "rrc/plant.hpp"
#include "rrc/sim.hpp"

namespace rrc {

/// Invalid or incomplete configuration; `path` names the offending field
/// as "section.key" (or just "section").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class ScenarioKind { step, chirp, free, identify };

const char* to_string(ScenarioKind k);

struct ScenarioSettings {
  ScenarioKind kind = ScenarioKind::step;
  StepSettings step;
  ChirpSettings chirp;
  double free_duration = 1.0;
  double initial_relative = 1e-3;  // free oscillation x_r(0) [m]
  std::vector<double> multipliers{0.5, 1.0, 1.5};
  IdentificationSettings identify;
  DisturbanceSchedule disturbance;

  bool operator==(const ScenarioSettings&) const = default;
};

/// Fully resolved configuration. Presets are expanded at parse time, so
/// serialize() writes explicit values only.
struct RunConfig {
  bool has_plant = false;
  bool has_controller = false;
  bool has_scenario = false;
  PlantParams plant;
  ControllerConfig controller;
  PlantParams design_plant;  // plant the gains and default M_mn are computed for
  ScenarioSettings scenario;
  SimConfig sim;

  ControllerSetup controller_setup() const { return {controller, design_plant}; }

  /// Throws ConfigError("plant") etc. for sections that are required but absent.
  void require(bool plant, bool controller, bool scenario) const;

  bool operator==(const RunConfig&) const = default;
};

/// INI-style text (`[section]`, `key = value`, `#` comments) or JSON with the
/// same section/key layout. Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// INI text that parses back to an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

PlantParams plant_preset(const std::string& name);
ControllerConfig controller_preset(const std::string& name);

}  // namespace rrc
