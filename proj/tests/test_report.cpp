#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rrc/report.hpp"

using namespace rrc;

TEST_CASE("summary keys and number format") {
  ExperimentResult a;
  a.experiment = "step";
  a.condition = "nominal";
  a.variant = Variant::proposed_rrc;
  a.metrics.overshoot = 1.0 / 3.0;
  a.metrics.settled = true;
  a.metrics.settling_time = 0.1035;
  ExperimentResult b = a;
  b.variant = Variant::conventional_rrc;
  b.metrics.diverged = true;
  b.metrics.settled = false;
  b.metrics.oscillation_index = INFINITY;
  const auto text = summary_json({a, b}, {{"P1", "title", true, "ok"}});
  const auto j = nlohmann::json::parse(text);
  CHECK(j["metrics"]["step"]["proposed_rrc"]["nominal"]["overshoot"].get<double>() == 0.333333333);
  CHECK(text.find("0.333333333,") != std::string::npos);
  CHECK(text.find("0.3333333333") == std::string::npos);
  CHECK(j["metrics"]["step"]["conventional_rrc"]["nominal"]["oscillation_index"].is_null());
  CHECK(j["metrics"]["step"]["conventional_rrc"]["nominal"]["settling_time"].is_null());
  CHECK(j["metrics"]["step"]["conventional_rrc"]["nominal"]["diverged"].get<bool>());
  CHECK(j["criteria"]["P1"]["passed"].get<bool>());
  CHECK(summary_json({a, b}) == summary_json({a, b}));
}

TEST_CASE("synthesis report for both tabulated controllers") {
  const auto prop = synthesize(table1_plant(), table4_controller());
  CHECK(prop.modified.motor_mass == doctest::Approx(0.458).epsilon(0.01));
  CHECK(prop.stable);
  CHECK(prop.coeffs.a3 == doctest::Approx(360.0));
  const auto conv = synthesize(table1_plant(), table3_controller());
  CHECK(conv.modified.motor_mass == doctest::Approx(0.273).epsilon(0.01));
  CHECK(conv.coeffs.a0 == doctest::Approx(std::pow(90.0, 4)).epsilon(1e-9));
  CHECK(conv.stable);
  const auto j = nlohmann::json::parse(synthesis_json(prop));
  CHECK(j["modified"]["f_p"].get<double>() == doctest::Approx(23.3).epsilon(0.005));
  CHECK(synthesis_text(prop).find("f'_p") != std::string::npos);

  ControllerConfig bad = table4_controller();
  bad.ratio = 0.3;
  CHECK_THROWS_WITH_AS(synthesize(table1_plant(), bad), doctest::Contains("0.524"),
                       std::invalid_argument);
}

TEST_CASE("bode data peaks at the resonance") {
  const auto csv = bode_csv(table1_plant(), 1.0, 100.0, 2000);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "f,motor_mag,motor_phase,load_mag,load_phase,relative_mag,relative_phase");
  double best_f = 0.0, best = 0.0;
  while (std::getline(in, line)) {
    double f = 0, mm = 0, mp = 0, lm = 0;
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &f, &mm, &mp, &lm);
    if (lm > best) best = lm, best_f = f;
  }
  CHECK(best_f == doctest::Approx(characteristic_freqs(table1_plant()).f_p).epsilon(0.005));
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "rrc_report_test";
  std::filesystem::remove_all(dir);
  write_text_file((dir / "a/b/c.txt").string(), "hello\n");
  std::ifstream f(dir / "a/b/c.txt");
  std::string s;
  std::getline(f, s);
  CHECK(s == "hello");
  CHECK_THROWS_AS(write_text_file("/proc/rrc/x.txt", "x"), IoError);
  std::filesystem::remove_all(dir);

  ExperimentResult r;
  r.experiment = "chirp";
  r.condition = "Mmn_x1.5";
  r.variant = Variant::conventional_rrc;
  CHECK(trajectory_path(r) == "chirp/conventional_rrc_Mmn_x1.5.csv");
}
