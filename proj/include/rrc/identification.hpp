#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "rrc/plant.hpp"
#include "rrc/sim.hpp"

namespace rrc {

/// Maximal-length shift-register sequence of the given degree (3..20) as
/// 0/1 bits, one full period (2^degree - 1 bits). `seed` selects the
/// nonzero starting register state.
std::vector<int> ml_sequence(int degree, std::uint64_t seed);

/// Binary force sequence, one entry per bit, each held for `bit_period`.
/// Uses the shortest maximal-length register whose period covers the record.
std::vector<double> prbs_signal(double low, double high, double bit_period, double length,
                                std::uint64_t seed);

struct WelchSettings {
  std::size_t segment_length = 4096;
  double overlap = 0.5;

  bool operator==(const WelchSettings&) const = default;
};

struct FrequencyResponseEstimate {
  std::vector<double> frequency;  // [Hz], ascending, DC excluded
  std::vector<std::complex<double>> gain;
  std::vector<double> coherence;  // 0 marks a bin with no input power
};

/// H = S_uy / S_uu with Hann-windowed, mean-removed, overlapping segments.
/// OpenMP over segments; accumulation happens in segment order so the
/// result matches the serial version bit for bit.
FrequencyResponseEstimate estimate_frequency_response(std::span<const double> input,
                                                      std::span<const double> output,
                                                      double sample_period,
                                                      const WelchSettings& settings = {});
FrequencyResponseEstimate estimate_frequency_response_serial(std::span<const double> input,
                                                             std::span<const double> output,
                                                             double sample_period,
                                                             const WelchSettings& settings = {});

/// Force-to-position responses of one identification record.
struct PlantFrf {
  FrequencyResponseEstimate motor;
  FrequencyResponseEstimate load;
  FrequencyResponseEstimate relative;
};

struct PlantFit {
  PlantParams params;
  double f_p = 0.0;
  double f_z = 0.0;
  double total_mass = 0.0;
};

/// Recovers (Mm, Ml, Ks) from resonance, antiresonance and total mass.
PlantParams params_from_frequencies(double f_p, double f_z, double total_mass);

/// Fits the two-inertia model in [f_lo, f_hi] Hz. Throws std::runtime_error
/// when no resonance peak or antiresonance notch lies inside the band.
PlantFit fit_plant(const PlantFrf& frf, double f_lo = 1.0, double f_hi = 50.0);

struct IdentificationSettings {
  double low = 10.0;         // [N]
  double high = 20.0;        // [N]
  double bit_period = 2e-3;  // [s]
  double record = 16.0;      // analysed length [s]
  double settle = 1.0;       // discarded lead-in [s]
  std::uint64_t seed = 1;
  int decimation = 10;       // block-average factor before spectral estimation
  WelchSettings welch;
  // Collocated PD on the motor keeps the rig inside its stroke.
  double hold_kp = 500.0;    // [N/m]
  double hold_kd = 20.0;     // [N s/m]
  SimConfig sim = [] {
    SimConfig s;
    s.quantization_enabled = false;
    return s;
  }();

  bool operator==(const IdentificationSettings&) const = default;
};

struct IdentificationResult {
  PlantFrf frf;
  PlantFit fit;
  Trajectory trajectory;
  double sample_period = 0.0;  // after decimation
};

/// Simulates the PRBS experiment on `truth` and identifies it from the
/// applied force and both encoder positions.
IdentificationResult identify_plant(const PlantParams& truth, const IdentificationSettings& s);

}  // namespace rrc
