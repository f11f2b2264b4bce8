#include "rrc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rrc {

namespace {

using Section = std::map<std::string, std::string>;
using Document = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Document parse_ini(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno), "malformed section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      if (doc.count(current)) throw ConfigError(current, "section appears twice");
      doc[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || current.empty()) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value' inside a section");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (doc[current].count(key)) throw ConfigError(current + "." + key, "key appears twice");
    doc[current][key] = value;
  }
  return doc;
}

std::string json_scalar(const nlohmann::json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return exact(v.get<double>());
  throw ConfigError(path, "unsupported JSON value");
}

Document parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("json", e.what());
  }
  if (!j.is_object()) throw ConfigError("json", "top level must be an object");
  Document doc;
  for (const auto& [name, body] : j.items()) {
    if (!body.is_object()) throw ConfigError(name, "section must be an object");
    auto& sec = doc[name];
    for (const auto& [key, value] : body.items()) {
      const std::string path = name + "." + key;
      if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ',';
          joined += json_scalar(item, path);
        }
        sec[key] = joined;
      } else {
        sec[key] = json_scalar(value, path);
      }
    }
  }
  return doc;
}

/// Reads typed values out of one section and tracks which keys were used.
class SectionReader {
 public:
  SectionReader(std::string name, const Section* section)
      : name_(std::move(name)), section_(section) {}

  bool present() const { return section_ != nullptr; }

  bool has(const std::string& key) const { return section_ && section_->count(key); }

  std::string text(const std::string& key) const { return section_->at(key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const std::string v = text(key);
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError(path(key), "expected a number, got '" + v + "'");
    }
    out = parsed;
  }

  void integer(const std::string& key, int& out) const {
    if (!has(key)) return;
    const std::string v = text(key);
    int parsed = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError(path(key), "expected an integer, got '" + v + "'");
    }
    out = parsed;
  }

  void unsigned64(const std::string& key, std::uint64_t& out) const {
    if (!has(key)) return;
    const std::string v = text(key);
    std::uint64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError(path(key), "expected a non-negative integer, got '" + v + "'");
    }
    out = parsed;
  }

  void size(const std::string& key, std::size_t& out) const {
    std::uint64_t v = out;
    unsigned64(key, v);
    out = static_cast<std::size_t>(v);
  }

  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const std::string v = text(key);
    if (v == "true" || v == "1" || v == "yes") {
      out = true;
    } else if (v == "false" || v == "0" || v == "no") {
      out = false;
    } else {
      throw ConfigError(path(key), "expected true/false, got '" + v + "'");
    }
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        throw ConfigError(path(key), "expected a comma-separated list of numbers");
      }
      out.push_back(v);
    }
    return out;
  }

  void reject_unknown(const std::set<std::string>& known) const {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!known.count(key)) throw ConfigError(path(key), "unknown key");
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  std::string name_;
  const Section* section_;
};

const Section* find_section(const Document& doc, const std::string& name) {
  const auto it = doc.find(name);
  return it == doc.end() ? nullptr : &it->second;
}

// Segments are written as "start:end:offset:amplitude:frequency:phase" joined by ';'.
std::vector<DisturbanceSegment> parse_segments(const SectionReader& r, const std::string& key) {
  std::vector<DisturbanceSegment> out;
  if (!r.has(key)) return out;
  std::stringstream ss(r.text(key));
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<double> f;
    std::stringstream fs(item);
    std::string field;
    while (std::getline(fs, field, ':')) {
      field = trim(field);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ConfigError(r.path(key), "malformed disturbance segment '" + item + "'");
      }
      f.push_back(v);
    }
    if (f.size() < 3 || f.size() > 6) {
      throw ConfigError(r.path(key),
                        "segment needs start:end:offset[:amplitude[:frequency[:phase]]]");
    }
    f.resize(6, 0.0);
    out.push_back({f[0], f[1], f[2], f[3], f[4], f[5]});
  }
  return out;
}

std::string format_segments(const std::vector<DisturbanceSegment>& segs) {
  std::string out;
  for (const auto& s : segs) {
    if (!out.empty()) out += ';';
    out += exact(s.start) + ':' + exact(s.end) + ':' + exact(s.offset) + ':' + exact(s.amplitude) +
           ':' + exact(s.frequency) + ':' + exact(s.phase);
  }
  return out;
}

ScenarioKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "step") return ScenarioKind::step;
  if (s == "chirp") return ScenarioKind::chirp;
  if (s == "free") return ScenarioKind::free;
  if (s == "identify") return ScenarioKind::identify;
  throw ConfigError(path, "unknown scenario kind '" + s + "'");
}

void read_plant(const SectionReader& r, PlantParams& p) {
  r.reject_unknown({"preset", "motor_mass", "load_mass", "spring_coeff", "force_coeff",
                    "damping_motor", "damping_load"});
  if (r.has("preset")) {
    try {
      p = plant_preset(r.text("preset"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(r.path("preset"), e.what());
    }
  }
  r.number("motor_mass", p.motor_mass);
  r.number("load_mass", p.load_mass);
  r.number("spring_coeff", p.spring_coeff);
  r.number("force_coeff", p.force_coeff);
  r.number("damping_motor", p.damping_motor);
  r.number("damping_load", p.damping_load);
}

template <typename Fn>
void wrap(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::step:
      return "step";
    case ScenarioKind::chirp:
      return "chirp";
    case ScenarioKind::free:
      return "free";
    case ScenarioKind::identify:
      return "identify";
  }
  return "unknown";
}

PlantParams plant_preset(const std::string& name) {
  if (name == "table1") return table1_plant();
  if (name == "table2") return table2_plant();
  throw std::invalid_argument("unknown plant preset '" + name + "' (expected table1 or table2)");
}

ControllerConfig controller_preset(const std::string& name) {
  if (name == "table3") return table3_controller();
  if (name == "table4") return table4_controller();
  throw std::invalid_argument("unknown controller preset '" + name +
                              "' (expected table3 or table4)");
}

void RunConfig::require(bool plant_needed, bool controller_needed, bool scenario_needed) const {
  if (plant_needed && !has_plant) throw ConfigError("plant", "missing section [plant]");
  if (controller_needed && !has_controller) {
    throw ConfigError("controller", "missing section [controller]");
  }
  if (scenario_needed && !has_scenario) {
    throw ConfigError("scenario", "missing section [scenario]");
  }
}

RunConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const Document doc =
      (first != std::string::npos && text[first] == '{') ? parse_json(text) : parse_ini(text);
  for (const auto& [name, body] : doc) {
    if (name != "plant" && name != "controller" && name != "scenario" && name != "sim") {
      throw ConfigError(name, "unknown section");
    }
  }

  RunConfig cfg;
  const SectionReader plant("plant", find_section(doc, "plant"));
  const SectionReader ctrl("controller", find_section(doc, "controller"));
  const SectionReader scen("scenario", find_section(doc, "scenario"));
  const SectionReader sim("sim", find_section(doc, "sim"));

  cfg.has_plant = plant.present();
  cfg.plant = table1_plant();
  read_plant(plant, cfg.plant);
  wrap("plant", [&] { cfg.plant.validate(); });

  cfg.has_controller = ctrl.present();
  ctrl.reject_unknown({"preset", "variant", "K", "g_d", "g_l", "alpha", "M_mn", "M_mn_multiplier",
                       "design_plant", "design_motor_mass", "design_load_mass",
                       "design_spring_coeff"});
  cfg.controller = table4_controller();
  if (ctrl.has("preset")) {
    wrap(ctrl.path("preset"), [&] { cfg.controller = controller_preset(ctrl.text("preset")); });
  }
  if (ctrl.has("variant")) {
    wrap(ctrl.path("variant"), [&] { cfg.controller.variant = parse_variant(ctrl.text("variant")); });
  }
  ctrl.number("K", cfg.controller.ratio);
  ctrl.number("g_d", cfg.controller.dob_cutoff);
  ctrl.number("g_l", cfg.controller.diff_cutoff);
  ctrl.number("alpha", cfg.controller.alpha);

  cfg.design_plant = cfg.plant;
  if (ctrl.has("design_plant")) {
    const std::string d = ctrl.text("design_plant");
    if (d != "plant") {
      wrap(ctrl.path("design_plant"), [&] { cfg.design_plant = plant_preset(d); });
    }
  }
  ctrl.number("design_motor_mass", cfg.design_plant.motor_mass);
  ctrl.number("design_load_mass", cfg.design_plant.load_mass);
  ctrl.number("design_spring_coeff", cfg.design_plant.spring_coeff);
  wrap("controller.design_plant", [&] { cfg.design_plant.validate(); });

  double multiplier = 1.0;
  ctrl.number("M_mn_multiplier", multiplier);
  if (ctrl.has("M_mn") && ctrl.has("M_mn_multiplier")) {
    throw ConfigError(ctrl.path("M_mn"), "give either M_mn or M_mn_multiplier, not both");
  }
  cfg.controller.nominal_motor_mass = multiplier * cfg.design_plant.motor_mass;
  ctrl.number("M_mn", cfg.controller.nominal_motor_mass);

  sim.reject_unknown({"Ts", "substeps", "actuator_limit", "encoder_resolution", "quantization",
                      "divergence_limit"});
  sim.number("Ts", cfg.sim.control_period);
  sim.integer("substeps", cfg.sim.substeps);
  sim.number("actuator_limit", cfg.sim.actuator_limit);
  sim.number("encoder_resolution", cfg.sim.encoder_resolution);
  sim.boolean("quantization", cfg.sim.quantization_enabled);
  sim.number("divergence_limit", cfg.sim.divergence_limit);
  wrap("sim", [&] { cfg.sim.validate(); });
  wrap("controller", [&] { cfg.controller.validate(cfg.sim.control_period); });

  cfg.has_scenario = scen.present();
  scen.reject_unknown({"kind", "step_time", "step_height", "step_duration", "chirp_start",
                       "chirp_f0", "chirp_f1", "chirp_sweep_time", "chirp_amplitude",
                       "chirp_tail", "free_duration", "initial_x_r", "multipliers", "prbs_low",
                       "prbs_high", "prbs_bit_period", "prbs_record", "prbs_settle", "seed",
                       "decimation", "welch_segment", "welch_overlap", "hold_kp", "hold_kd",
                       "identify_quantization", "dist_motor", "dist_load"});
  auto& sc = cfg.scenario;
  if (scen.has("kind")) sc.kind = parse_kind(scen.text("kind"), scen.path("kind"));
  scen.number("step_time", sc.step.step_time);
  scen.number("step_height", sc.step.height);
  scen.number("step_duration", sc.step.duration);
  scen.number("chirp_start", sc.chirp.start);
  scen.number("chirp_f0", sc.chirp.f0);
  scen.number("chirp_f1", sc.chirp.f1);
  scen.number("chirp_sweep_time", sc.chirp.sweep_time);
  scen.number("chirp_amplitude", sc.chirp.amplitude);
  scen.number("chirp_tail", sc.chirp.tail);
  scen.number("free_duration", sc.free_duration);
  scen.number("initial_x_r", sc.initial_relative);
  if (scen.has("multipliers")) sc.multipliers = scen.list("multipliers");
  scen.number("prbs_low", sc.identify.low);
  scen.number("prbs_high", sc.identify.high);
  scen.number("prbs_bit_period", sc.identify.bit_period);
  scen.number("prbs_record", sc.identify.record);
  scen.number("prbs_settle", sc.identify.settle);
  scen.unsigned64("seed", sc.identify.seed);
  scen.integer("decimation", sc.identify.decimation);
  scen.size("welch_segment", sc.identify.welch.segment_length);
  scen.number("welch_overlap", sc.identify.welch.overlap);
  scen.number("hold_kp", sc.identify.hold_kp);
  scen.number("hold_kd", sc.identify.hold_kd);
  scen.boolean("identify_quantization", sc.identify.sim.quantization_enabled);
  sc.disturbance.motor = parse_segments(scen, "dist_motor");
  sc.disturbance.load = parse_segments(scen, "dist_load");

  // The identification run shares the rig settings except for quantization.
  const bool id_quant = sc.identify.sim.quantization_enabled;
  sc.identify.sim = cfg.sim;
  sc.identify.sim.quantization_enabled = id_quant;

  wrap("scenario.dist_motor", [&] { sc.disturbance.validate(); });
  if (!(sc.step.height != 0.0) || !(sc.step.duration > sc.step.step_time)) {
    throw ConfigError("scenario.step_height", "step needs nonzero height and duration > step_time");
  }
  if (!(sc.chirp.f0 < sc.chirp.f1) || !(sc.chirp.sweep_time > 0.0)) {
    throw ConfigError("scenario.chirp_f0", "chirp needs f0 < f1 and sweep_time > 0");
  }
  for (double m : sc.multipliers) {
    if (!(m > 0.0)) throw ConfigError("scenario.multipliers", "multipliers must be > 0");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  auto num = [&](const char* key, double v) { kv(key, exact(v)); };
  if (cfg.has_plant) {
    out << "[plant]\n";
    num("motor_mass", cfg.plant.motor_mass);
    num("load_mass", cfg.plant.load_mass);
    num("spring_coeff", cfg.plant.spring_coeff);
    num("force_coeff", cfg.plant.force_coeff);
    num("damping_motor", cfg.plant.damping_motor);
    num("damping_load", cfg.plant.damping_load);
    out << '\n';
  }
  if (cfg.has_controller) {
    out << "[controller]\n";
    kv("variant", to_string(cfg.controller.variant));
    num("K", cfg.controller.ratio);
    num("g_d", cfg.controller.dob_cutoff);
    num("g_l", cfg.controller.diff_cutoff);
    num("alpha", cfg.controller.alpha);
    num("M_mn", cfg.controller.nominal_motor_mass);
    num("design_motor_mass", cfg.design_plant.motor_mass);
    num("design_load_mass", cfg.design_plant.load_mass);
    num("design_spring_coeff", cfg.design_plant.spring_coeff);
    out << '\n';
  }
  if (cfg.has_scenario) {
    const auto& sc = cfg.scenario;
    out << "[scenario]\n";
    kv("kind", to_string(sc.kind));
    num("step_time", sc.step.step_time);
    num("step_height", sc.step.height);
    num("step_duration", sc.step.duration);
    num("chirp_start", sc.chirp.start);
    num("chirp_f0", sc.chirp.f0);
    num("chirp_f1", sc.chirp.f1);
    num("chirp_sweep_time", sc.chirp.sweep_time);
    num("chirp_amplitude", sc.chirp.amplitude);
    num("chirp_tail", sc.chirp.tail);
    num("free_duration", sc.free_duration);
    num("initial_x_r", sc.initial_relative);
    std::string mults;
    for (double m : sc.multipliers) mults += (mults.empty() ? "" : ",") + exact(m);
    kv("multipliers", mults);
    num("prbs_low", sc.identify.low);
    num("prbs_high", sc.identify.high);
    num("prbs_bit_period", sc.identify.bit_period);
    num("prbs_record", sc.identify.record);
    num("prbs_settle", sc.identify.settle);
    kv("seed", std::to_string(sc.identify.seed));
    kv("decimation", std::to_string(sc.identify.decimation));
    kv("welch_segment", std::to_string(sc.identify.welch.segment_length));
    num("welch_overlap", sc.identify.welch.overlap);
    num("hold_kp", sc.identify.hold_kp);
    num("hold_kd", sc.identify.hold_kd);
    kv("identify_quantization", sc.identify.sim.quantization_enabled ? "true" : "false");
    if (!sc.disturbance.motor.empty()) kv("dist_motor", format_segments(sc.disturbance.motor));
    if (!sc.disturbance.load.empty()) kv("dist_load", format_segments(sc.disturbance.load));
    out << '\n';
  }
  out << "[sim]\n";
  num("Ts", cfg.sim.control_period);
  kv("substeps", std::to_string(cfg.sim.substeps));
  num("actuator_limit", cfg.sim.actuator_limit);
  num("encoder_resolution", cfg.sim.encoder_resolution);
  kv("quantization", cfg.sim.quantization_enabled ? "true" : "false");
  num("divergence_limit", cfg.sim.divergence_limit);
  return out.str();
}

}  // namespace rrc
