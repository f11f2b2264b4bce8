#include "rrc/report.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace rrc {

namespace {

using Json = nlohmann::ordered_json;

// Round through the 9-digit text form so the dump is stable and short.
Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(format_number(v).c_str(), nullptr);
}

Json plant_json(const PlantParams& p) {
  return Json{{"motor_mass", num(p.motor_mass)},       {"load_mass", num(p.load_mass)},
              {"spring_coeff", num(p.spring_coeff)},   {"force_coeff", num(p.force_coeff)},
              {"damping_motor", num(p.damping_motor)}, {"damping_load", num(p.damping_load)}};
}

Json metrics_json(const Metrics& m) {
  return Json{{"overshoot", num(m.overshoot)},
              {"settling_time", m.settled ? num(m.settling_time) : Json(nullptr)},
              {"settled", m.settled},
              {"steady_state_error", num(m.steady_state_error)},
              {"oscillation_index", num(m.oscillation_index)},
              {"rms_tracking_error", num(m.rms_tracking_error)},
              {"diverged", m.diverged}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

SynthesisReport synthesize(const PlantParams& design_plant, const ControllerConfig& ctrl) {
  SynthesisReport r;
  r.plant = design_plant;
  r.freqs = characteristic_freqs(design_plant);
  r.controller = ctrl;
  const double K = ctrl.ratio;
  switch (ctrl.variant) {
    case Variant::proposed_rrc:
      r.modified = modified_params(design_plant, K);
      r.gains = design_gains(ctrl.variant, design_plant, K, ctrl.alpha);
      r.coeffs = closed_loop_coeffs(design_plant, K, r.gains);
      break;
    case Variant::conventional_rrc: {
      modified_params(design_plant, K);
      r.modified = conventional_modified_params(design_plant, K);
      r.gains = design_gains(ctrl.variant, design_plant, K, ctrl.alpha);
      PlantParams light = design_plant;
      light.motor_mass = r.modified.motor_mass;
      r.coeffs = closed_loop_coeffs(light, 1.0, r.gains);
      break;
    }
    case Variant::state_feedback_only:
      r.modified = modified_params(design_plant, 1.0);
      r.gains = design_gains(ctrl.variant, design_plant, 1.0, ctrl.alpha);
      r.coeffs = closed_loop_coeffs(design_plant, 1.0, r.gains);
      break;
  }
  r.stable = routh_stable(r.coeffs);
  r.warning = gain_warning(r.gains);
  return r;
}

std::string synthesis_text(const SynthesisReport& r) {
  std::ostringstream out;
  auto row = [&](const char* name, double v, const char* unit) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %-22s %14.6g %s\n", name, v, unit);
    out << buf;
  };
  out << "plant\n";
  row("M_m", r.plant.motor_mass, "kg");
  row("M_l", r.plant.load_mass, "kg");
  row("K_s", r.plant.spring_coeff, "N/m");
  row("f_p", r.freqs.f_p, "Hz");
  row("f_z", r.freqs.f_z, "Hz");
  out << "controller (" << to_string(r.controller.variant) << ")\n";
  row("K", r.controller.ratio, "");
  row("g_d", r.controller.dob_cutoff, "rad/s");
  row("g_l", r.controller.diff_cutoff, "rad/s");
  row("alpha", r.controller.alpha, "rad/s");
  row("M_mn", r.controller.nominal_motor_mass, "kg");
  out << "modified system\n";
  row("M'_m", r.modified.motor_mass, "kg");
  row("M'_l", r.modified.load_mass, "kg");
  row("K'_s", r.modified.spring_coeff, "N/m");
  row("f'_p", r.modified.f_p(), "Hz");
  out << "gains\n";
  row("K_pm", r.gains.k_pm, "N/m");
  row("K_dm", r.gains.k_dm, "N s/m");
  row("K_pl", r.gains.k_pl, "N/m");
  row("K_dl", r.gains.k_dl, "N s/m");
  out << "closed loop: s^4 + a3 s^3 + a2 s^2 + a1 s + a0\n";
  row("a3", r.coeffs.a3, "");
  row("a2", r.coeffs.a2, "");
  row("a1", r.coeffs.a1, "");
  row("a0", r.coeffs.a0, "");
  out << "  stable: " << (r.stable ? "yes" : "no") << "\n";
  if (r.warning) out << "  warning: " << *r.warning << "\n";
  return out.str();
}

std::string synthesis_json(const SynthesisReport& r) {
  Json j;
  j["plant"] = plant_json(r.plant);
  j["frequencies"] = Json{{"f_p", num(r.freqs.f_p)}, {"f_z", num(r.freqs.f_z)}};
  j["controller"] = Json{{"variant", to_string(r.controller.variant)},
                         {"K", num(r.controller.ratio)},
                         {"g_d", num(r.controller.dob_cutoff)},
                         {"g_l", num(r.controller.diff_cutoff)},
                         {"alpha", num(r.controller.alpha)},
                         {"M_mn", num(r.controller.nominal_motor_mass)}};
  j["modified"] = Json{{"motor_mass", num(r.modified.motor_mass)},
                       {"load_mass", num(r.modified.load_mass)},
                       {"spring_coeff", num(r.modified.spring_coeff)},
                       {"f_p", num(r.modified.f_p())}};
  j["gains"] = Json{{"k_pm", num(r.gains.k_pm)},
                    {"k_dm", num(r.gains.k_dm)},
                    {"k_pl", num(r.gains.k_pl)},
                    {"k_dl", num(r.gains.k_dl)}};
  j["closed_loop"] = Json{{"numerator_gain", num(r.coeffs.numerator_gain)}, {"a3", num(r.coeffs.a3)},
                          {"a2", num(r.coeffs.a2)},   {"a1", num(r.coeffs.a1)},
                          {"a0", num(r.coeffs.a0)}};
  j["stable"] = r.stable;
  j["warning"] = r.warning ? Json(*r.warning) : Json(nullptr);
  return dump(j);
}

std::string bode_csv(const PlantParams& plant, double f_lo, double f_hi, int points) {
  std::ostringstream out;
  out << "f,motor_mag,motor_phase,load_mag,load_phase,relative_mag,relative_phase\n";
  const double step = std::log(f_hi / f_lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double f = f_lo * std::exp(step * i);
    const double w = 2.0 * std::numbers::pi * f;
    std::complex<double> g[3];
    try {
      g[0] = frequency_response(plant, Channel::motor, w);
      g[1] = frequency_response(plant, Channel::load, w);
      g[2] = frequency_response(plant, Channel::relative, w);
    } catch (const std::domain_error&) {
      continue;
    }
    out << format_number(f);
    for (const auto& v : g) {
      out << ',' << format_number(std::abs(v)) << ','
          << format_number(std::arg(v) * 180.0 / std::numbers::pi);
    }
    out << '\n';
  }
  return out.str();
}

std::string summary_json(const std::vector<ExperimentResult>& results,
                         const std::vector<CriterionResult>& criteria) {
  Json metrics = Json::object();
  for (const auto& r : results) {
    metrics[r.experiment][to_string(r.variant)][r.condition] = metrics_json(r.metrics);
  }
  Json j;
  j["metrics"] = metrics;
  if (!criteria.empty()) {
    Json c = Json::object();
    for (const auto& cr : criteria) {
      c[cr.id] = Json{{"title", cr.title}, {"passed", cr.passed}, {"detail", cr.detail}};
    }
    j["criteria"] = c;
  }
  return dump(j);
}

std::string identification_json(const IdentificationResult& r,
                                const std::optional<PlantParams>& truth) {
  Json j;
  j["estimate"] = plant_json(r.fit.params);
  j["f_p"] = num(r.fit.f_p);
  j["f_z"] = num(r.fit.f_z);
  j["total_mass"] = num(r.fit.total_mass);
  if (truth) {
    j["truth"] = plant_json(*truth);
    j["relative_error"] =
        Json{{"motor_mass", num(r.fit.params.motor_mass / truth->motor_mass - 1.0)},
             {"load_mass", num(r.fit.params.load_mass / truth->load_mass - 1.0)},
             {"spring_coeff", num(r.fit.params.spring_coeff / truth->spring_coeff - 1.0)}};
  }
  return dump(j);
}

std::string frf_csv(const PlantFrf& frf) {
  std::ostringstream out;
  out << "f,motor_re,motor_im,motor_coh,load_re,load_im,load_coh,relative_re,relative_im,"
         "relative_coh\n";
  for (std::size_t i = 0; i < frf.motor.frequency.size(); ++i) {
    out << format_number(frf.motor.frequency[i]);
    for (const auto* e : {&frf.motor, &frf.load, &frf.relative}) {
      out << ',' << format_number(e->gain[i].real()) << ',' << format_number(e->gain[i].imag())
          << ',' << format_number(e->coherence[i]);
    }
    out << '\n';
  }
  return out.str();
}

std::string trajectory_path(const ExperimentResult& r) {
  return r.experiment + "/" + to_string(r.variant) + "_" + r.condition + ".csv";
}

void make_directories(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir + "'");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) make_directories(parent.string());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path + "'");
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::ostringstream out;
  write_csv(out, traj);
  write_text_file(path, out.str());
}

}  // namespace rrc
