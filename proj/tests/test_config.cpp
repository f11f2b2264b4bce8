#include <doctest.h>

#include <random>

#include "rrc/config.hpp"

using namespace rrc;

namespace {

const char* kStepIni = R"(
# comment
[plant]
preset = table1

[controller]
preset = table4
g_d = 400   # trailing comment

[scenario]
kind = step
step_height = 0.002

[sim]
substeps = 4
quantization = false
)";

RunConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  RunConfig c;
  c.has_plant = c.has_controller = c.has_scenario = true;
  c.plant = {pick(0.2, 3.0), pick(0.2, 3.0), pick(1e3, 1e4), pick(1.0, 50.0), pick(0.0, 1.0),
             pick(0.0, 1.0)};
  c.design_plant = c.plant;
  c.design_plant.motor_mass = pick(0.2, 3.0);
  c.design_plant.load_mass = pick(0.2, 3.0);
  c.design_plant.spring_coeff = pick(1e3, 1e4);
  c.controller.variant = static_cast<Variant>(rng() % 3);
  c.controller.ratio = pick(1.0, 5.0);
  c.controller.dob_cutoff = pick(10.0, 1000.0);
  c.controller.diff_cutoff = pick(1000.0, 5000.0);
  c.controller.alpha = pick(10.0, 200.0);
  c.controller.nominal_motor_mass = pick(0.2, 3.0);
  c.sim.control_period = pick(5e-5, 2e-4);
  c.sim.substeps = 1 + static_cast<int>(rng() % 20);
  c.sim.actuator_limit = pick(10.0, 200.0);
  c.sim.encoder_resolution = pick(1e-9, 1e-6);
  c.sim.quantization_enabled = rng() % 2;
  c.sim.divergence_limit = pick(0.1, 10.0);
  auto& s = c.scenario;
  s.kind = static_cast<ScenarioKind>(rng() % 4);
  s.step = {pick(0.0, 0.2), pick(-1e-2, 1e-2), pick(0.5, 2.0)};
  s.chirp = {pick(0.0, 0.2), pick(0.1, 1.0), pick(5.0, 40.0), pick(1.0, 10.0), pick(1e-4, 1e-3),
             pick(0.1, 1.0)};
  s.free_duration = pick(0.1, 2.0);
  s.initial_relative = pick(-1e-3, 1e-3);
  s.multipliers = {pick(0.1, 1.0), pick(1.0, 2.0), pick(0.5, 1.5)};
  s.identify.low = pick(-20.0, 20.0);
  s.identify.high = pick(-20.0, 20.0);
  s.identify.bit_period = pick(1e-3, 5e-3);
  s.identify.record = pick(1.0, 20.0);
  s.identify.settle = pick(0.0, 2.0);
  s.identify.seed = rng();
  s.identify.decimation = 1 + static_cast<int>(rng() % 20);
  s.identify.welch = {256u + rng() % 4096, pick(0.0, 0.9)};
  s.identify.hold_kp = pick(100.0, 1000.0);
  s.identify.hold_kd = pick(1.0, 50.0);
  s.identify.sim = c.sim;
  s.identify.sim.quantization_enabled = rng() % 2;
  if (rng() % 2) s.disturbance.motor = {{0.1, 0.2, pick(-1, 1), pick(0, 1), pick(0, 50), pick(0, 3)}};
  if (rng() % 2) {
    s.disturbance.load = {{0.0, 0.5, pick(-1, 1)}, {0.5, 0.9, pick(-1, 1), pick(0, 1), 3.0, 0.0}};
  }
  if (s.step.height == 0.0) s.step.height = 1e-3;
  return c;
}

}  // namespace

TEST_CASE("INI config with presets and overrides") {
  const auto c = parse_config(kStepIni);
  CHECK(c.has_plant);
  CHECK(c.plant == table1_plant());
  CHECK(c.controller.variant == Variant::proposed_rrc);
  CHECK(c.controller.ratio == 2.62);
  CHECK(c.controller.dob_cutoff == 400.0);
  CHECK(c.controller.nominal_motor_mass == 1.20);
  CHECK(c.design_plant == table1_plant());
  CHECK(c.scenario.kind == ScenarioKind::step);
  CHECK(c.scenario.step.height == 0.002);
  CHECK(c.scenario.step.step_time == 0.1);
  CHECK(c.sim.substeps == 4);
  CHECK_FALSE(c.sim.quantization_enabled);
  CHECK(c.scenario.identify.sim.substeps == 4);
}

TEST_CASE("JSON config is equivalent to INI") {
  const auto json = parse_config(R"({
    "plant": {"preset": "table1"},
    "controller": {"preset": "table4", "g_d": 400},
    "scenario": {"kind": "step", "step_height": 0.002},
    "sim": {"substeps": 4, "quantization": false}
  })");
  CHECK(json == parse_config(kStepIni));
  const auto lists = parse_config(R"({"scenario": {"multipliers": [0.25, 1, 2]}})");
  CHECK(lists.scenario.multipliers == std::vector<double>{0.25, 1.0, 2.0});
}

TEST_CASE("mass multiplier is relative to the design plant") {
  const auto c = parse_config(
      "[plant]\npreset = table2\n[controller]\npreset = table3\ndesign_plant = table1\n"
      "M_mn_multiplier = 1.5\n");
  CHECK(c.plant == table2_plant());
  CHECK(c.design_plant == table1_plant());
  CHECK(c.controller.nominal_motor_mass == doctest::Approx(1.8));
  CHECK(c.controller_setup().design_plant == table1_plant());
}

TEST_CASE("config errors carry the field path") {
  auto path_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of("[plant]\nmass = 1\n") == "plant.mass");
  CHECK(path_of("[plants]\n") == "plants");
  CHECK(path_of("[plant]\nmotor_mass = heavy\n") == "plant.motor_mass");
  CHECK(path_of("[plant]\nmotor_mass = -1\n") == "plant");
  CHECK(path_of("[plant]\npreset = table9\n") == "plant.preset");
  CHECK(path_of("[controller]\nvariant = pid\n") == "controller.variant");
  CHECK(path_of("[controller]\nM_mn = 1\nM_mn_multiplier = 1\n") == "controller.M_mn");
  CHECK(path_of("[scenario]\nkind = ramp\n") == "scenario.kind");
  CHECK(path_of("[scenario]\nmultipliers = 1, x\n") == "scenario.multipliers");
  CHECK(path_of("[scenario]\ndist_motor = 0:1\n") == "scenario.dist_motor");
  CHECK(path_of("[scenario]\ndist_motor = 0:1:1;0.5:2:1\n") == "scenario.dist_motor");
  CHECK(path_of("[sim]\nsubsteps = 2.5\n") == "sim.substeps");
  CHECK(path_of("[sim]\nquantization = maybe\n") == "sim.quantization");
  CHECK(path_of("[sim]\nsubsteps = 0\n") == "sim");
  CHECK(path_of("key = 1\n") == "line 1");
  CHECK(path_of("[plant]\n[plant]\n") == "plant");
  CHECK(path_of("{\"plant\": 3}") == "plant");
  CHECK(path_of("{\"plant\": ") == "json");
}

TEST_CASE("required sections") {
  const auto c = parse_config("[controller]\npreset = table4\n");
  CHECK_NOTHROW(c.require(false, true, false));
  try {
    c.require(true, true, false);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "plant");
  }
}

TEST_CASE("presets") {
  CHECK(plant_preset("table2") == table2_plant());
  CHECK(controller_preset("table3") == table3_controller());
  CHECK_THROWS_AS(plant_preset("table3"), std::invalid_argument);
  CHECK_THROWS_AS(controller_preset("table1"), std::invalid_argument);
}

TEST_CASE("parse, serialize, parse is the identity") {
  const auto a = parse_config(kStepIni);
  const auto b = parse_config(serialize_config(a));
  CHECK(a == b);
  CHECK(serialize_config(a) == serialize_config(b));
  CHECK(parse_config("") == parse_config(serialize_config(parse_config(""))));
}

TEST_CASE("random configs survive a round trip") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto c = random_config(rng);
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
  }
}

TEST_CASE("disturbance segments") {
  const auto c = parse_config("[scenario]\ndist_load = 0.2:0.4:1.5; 0.5:0.6:0:2:10:0.5\n");
  REQUIRE(c.scenario.disturbance.load.size() == 2);
  CHECK(c.scenario.disturbance.load[0] == DisturbanceSegment{0.2, 0.4, 1.5, 0, 0, 0});
  CHECK(c.scenario.disturbance.load[1] == DisturbanceSegment{0.5, 0.6, 0, 2, 10, 0.5});
}

TEST_CASE("config file loading") {
  CHECK_THROWS_AS(load_config("/nonexistent/rrc.ini"), std::ios_base::failure);
}
