#include "rrc/identification.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rrc/controllers.hpp"

namespace rrc {

namespace {

// Feedback taps (1-based) of maximal-length Fibonacci registers.
const std::vector<int>& taps_for(int degree) {
  static const std::array<std::vector<int>, 21> table = {{
      {}, {}, {},
      {3, 2}, {4, 3}, {5, 3}, {6, 5}, {7, 6}, {8, 6, 5, 4}, {9, 5}, {10, 7},
      {11, 9}, {12, 6, 4, 1}, {13, 4, 3, 1}, {14, 5, 3, 1}, {15, 14}, {16, 15, 13, 4},
      {17, 14}, {18, 11}, {19, 6, 2, 1}, {20, 17},
  }};
  if (degree < 3 || degree > 20) {
    throw std::invalid_argument("ml_sequence: degree must be in [3, 20]");
  }
  return table[static_cast<std::size_t>(degree)];
}

}  // namespace

std::vector<int> ml_sequence(int degree, std::uint64_t seed) {
  const auto& taps = taps_for(degree);
  const std::uint64_t period = (std::uint64_t{1} << degree) - 1;
  std::uint64_t reg = seed % period + 1;  // nonzero
  std::vector<int> bits(period);
  for (auto& b : bits) {
    b = static_cast<int>(reg & 1u);
    std::uint64_t fb = 0;
    for (int t : taps) fb ^= (reg >> (degree - t)) & 1u;
    reg = (reg >> 1) | (fb << (degree - 1));
  }
  return bits;
}

std::vector<double> prbs_signal(double low, double high, double bit_period, double length,
                                std::uint64_t seed) {
  if (!std::isfinite(low) || !std::isfinite(high)) {
    throw std::invalid_argument("prbs_signal: levels must be finite");
  }
  if (!(bit_period > 0.0) || !(length > 0.0)) {
    throw std::invalid_argument("prbs_signal: bit period and length must be > 0");
  }
  const auto nbits = static_cast<std::size_t>(std::ceil(length / bit_period - 1e-9));
  int degree = 3;
  while (degree < 20 && ((std::size_t{1} << degree) - 1) < nbits) ++degree;
  const auto seq = ml_sequence(degree, seed);
  std::vector<double> out(nbits);
  for (std::size_t i = 0; i < nbits; ++i) out[i] = seq[i % seq.size()] ? high : low;
  return out;
}

namespace {

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

struct SegmentSpectra {
  std::vector<double> suu;
  std::vector<double> syy;
  std::vector<std::complex<double>> suy;
};

class WelchPlan {
 public:
  explicit WelchPlan(std::size_t n) : n_(n), in_(alloc_real(n)), out_(alloc_complex(n / 2 + 1)) {
    // Planning is not thread-safe; execution on other buffers is.
#pragma omp critical(fftw_planner)
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    window_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(n));
    }
  }
  ~WelchPlan() {
#pragma omp critical(fftw_planner)
    fftw_destroy_plan(plan_);
  }
  WelchPlan(const WelchPlan&) = delete;
  WelchPlan& operator=(const WelchPlan&) = delete;

  /// Thread-safe: uses caller-owned scratch buffers.
  void spectrum(std::span<const double> x, double* scratch, fftw_complex* out) const {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) scratch[i] = (x[i] - mean) * window_[i];
    fftw_execute_dft_r2c(plan_, scratch, out);
  }

  SegmentSpectra segment(std::span<const double> u, std::span<const double> y) const {
    const std::size_t bins = n_ / 2 + 1;
    auto scratch = alloc_real(n_);
    auto fu = alloc_complex(bins);
    auto fy = alloc_complex(bins);
    spectrum(u, scratch.get(), fu.get());
    spectrum(y, scratch.get(), fy.get());
    SegmentSpectra s;
    s.suu.resize(bins);
    s.syy.resize(bins);
    s.suy.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const std::complex<double> a(fu[k][0], fu[k][1]);
      const std::complex<double> b(fy[k][0], fy[k][1]);
      s.suu[k] = std::norm(a);
      s.syy[k] = std::norm(b);
      s.suy[k] = std::conj(a) * b;
    }
    return s;
  }

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  RealBuffer in_;
  ComplexBuffer out_;
  fftw_plan plan_ = nullptr;
  std::vector<double> window_;
};

std::vector<std::size_t> segment_starts(std::size_t total, const WelchSettings& s) {
  if (s.segment_length < 8) throw std::invalid_argument("Welch segment length must be >= 8");
  if (!(s.overlap >= 0.0 && s.overlap < 1.0)) {
    throw std::invalid_argument("Welch overlap must be in [0, 1)");
  }
  if (total < s.segment_length) {
    throw std::invalid_argument("record shorter than one Welch segment");
  }
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(s.segment_length) *
                                                (1.0 - s.overlap))));
  std::vector<std::size_t> starts;
  for (std::size_t b = 0; b + s.segment_length <= total; b += hop) starts.push_back(b);
  return starts;
}

FrequencyResponseEstimate combine(const std::vector<SegmentSpectra>& segs, std::size_t n,
                                  double sample_period) {
  const std::size_t bins = n / 2 + 1;
  std::vector<double> suu(bins, 0.0), syy(bins, 0.0);
  std::vector<std::complex<double>> suy(bins, 0.0);
  for (const auto& s : segs) {
    for (std::size_t k = 0; k < bins; ++k) {
      suu[k] += s.suu[k];
      syy[k] += s.syy[k];
      suy[k] += s.suy[k];
    }
  }
  FrequencyResponseEstimate est;
  const double df = 1.0 / (static_cast<double>(n) * sample_period);
  // Bins with (numerically) no input power carry no information.
  const double floor = 1e-20 * *std::max_element(suu.begin(), suu.end());
  for (std::size_t k = 1; k < bins; ++k) {
    est.frequency.push_back(static_cast<double>(k) * df);
    if (!(suu[k] > floor)) {
      est.gain.emplace_back(0.0, 0.0);
      est.coherence.push_back(0.0);
      continue;
    }
    est.gain.push_back(suy[k] / suu[k]);
    const double denom = suu[k] * syy[k];
    est.coherence.push_back(denom > 0.0 ? std::clamp(std::norm(suy[k]) / denom, 0.0, 1.0)
                                        : 0.0);
  }
  return est;
}

void check_inputs(std::span<const double> u, std::span<const double> y, double ts) {
  if (u.size() != y.size()) throw std::invalid_argument("input/output lengths differ");
  if (!(ts > 0.0)) throw std::invalid_argument("sample period must be > 0");
}

}  // namespace

FrequencyResponseEstimate estimate_frequency_response_serial(std::span<const double> input,
                                                             std::span<const double> output,
                                                             double sample_period,
                                                             const WelchSettings& settings) {
  check_inputs(input, output, sample_period);
  const auto starts = segment_starts(input.size(), settings);
  const std::size_t n = settings.segment_length;
  WelchPlan plan(n);
  std::vector<SegmentSpectra> segs;
  segs.reserve(starts.size());
  for (std::size_t b : starts) {
    segs.push_back(plan.segment(input.subspan(b, n), output.subspan(b, n)));
  }
  return combine(segs, n, sample_period);
}

FrequencyResponseEstimate estimate_frequency_response(std::span<const double> input,
                                                      std::span<const double> output,
                                                      double sample_period,
                                                      const WelchSettings& settings) {
  check_inputs(input, output, sample_period);
  const auto starts = segment_starts(input.size(), settings);
  const std::size_t n = settings.segment_length;
  WelchPlan plan(n);
  std::vector<SegmentSpectra> segs(starts.size());
  const int count = static_cast<int>(starts.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    const std::size_t b = starts[static_cast<std::size_t>(i)];
    segs[static_cast<std::size_t>(i)] = plan.segment(input.subspan(b, n), output.subspan(b, n));
  }
  return combine(segs, n, sample_period);
}

PlantParams params_from_frequencies(double f_p, double f_z, double total_mass) {
  if (!(f_p > f_z && f_z > 0.0 && total_mass > 0.0)) {
    throw std::invalid_argument("params_from_frequencies: need f_p > f_z > 0 and mass > 0");
  }
  const double wp = 2.0 * std::numbers::pi * f_p;
  const double wz = 2.0 * std::numbers::pi * f_z;
  // wp^2 / wz^2 = 1 + Ml/Mm = M_total/Mm.
  PlantParams p;
  p.motor_mass = total_mass * (wz * wz) / (wp * wp);
  p.load_mass = total_mass - p.motor_mass;
  p.spring_coeff = wz * wz * p.load_mass;
  return p;
}

namespace {

constexpr double kMinCoherence = 0.95;

std::size_t argext(const std::vector<double>& v, std::size_t lo, std::size_t hi, bool maximum) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (maximum ? v[i] > v[best] : v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace

PlantFit fit_plant(const PlantFrf& frf, double f_lo, double f_hi) {
  const auto& freq = frf.relative.frequency;
  if (freq.empty() || frf.motor.frequency.size() != freq.size() ||
      frf.load.frequency.size() != freq.size()) {
    throw std::invalid_argument("fit_plant: channel grids differ or are empty");
  }
  std::size_t lo = 0;
  while (lo < freq.size() && freq[lo] < f_lo) ++lo;
  std::size_t hi = lo;
  while (hi < freq.size() && freq[hi] <= f_hi) ++hi;
  if (hi - lo < 8) throw std::runtime_error("fit_plant: band contains too few bins");

  std::vector<double> mag_r(freq.size()), mag_m(freq.size());
  for (std::size_t k = 0; k < freq.size(); ++k) {
    mag_r[k] = std::abs(frf.relative.gain[k]);
    mag_m[k] = std::abs(frf.motor.gain[k]);
  }

  // Coarse peak of the relative channel, then a least-squares refinement on
  // 1/G_r = Mm (wp^2 - w^2), which is linear in (Mm wp^2, Mm).
  const std::size_t peak = argext(mag_r, lo, hi, true);
  if (peak == lo || peak + 1 >= hi) {
    throw std::runtime_error("fit_plant: resonance peak not found inside the band");
  }
  const double f_peak = freq[peak];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (std::size_t k = lo; k < hi; ++k) {
    if (freq[k] < 0.6 * f_peak || freq[k] > 1.4 * f_peak) continue;
    if (std::abs(freq[k] - f_peak) < 1.5 * (freq[1] - freq[0])) continue;  // leakage-dominated
    if (frf.relative.coherence[k] < kMinCoherence) continue;
    const double w = 2.0 * std::numbers::pi * freq[k];
    const double x = w * w;
    const double y = (1.0 / frf.relative.gain[k]).real();
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 4) throw std::runtime_error("fit_plant: too few coherent bins around the resonance");
  const double nn = static_cast<double>(used);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);  // -Mm
  const double intercept = (sy - slope * sx) / nn;                  // Mm wp^2
  const double wp2 = intercept / -slope;
  if (!(wp2 > 0.0)) throw std::runtime_error("fit_plant: resonance fit is not physical");

  // Coarse notch of the motor channel below the peak; refined from
  // x_l/x_r = wz^2 / s^2, i.e. wz^2 = -w^2 Re(G_l/G_r).
  const std::size_t notch = argext(mag_m, lo, peak, false);
  if (notch == lo) throw std::runtime_error("fit_plant: antiresonance notch not found in band");
  const double f_notch = freq[notch];
  // Weighted by |G_r|^2 so bins where the relative motion is strong dominate.
  double wz2_sum = 0.0;
  double weight_sum = 0.0;
  for (std::size_t k = lo; k < hi; ++k) {
    if (freq[k] < 0.5 * f_notch || freq[k] > 1.4 * f_peak) continue;
    if (frf.relative.coherence[k] < kMinCoherence || frf.load.coherence[k] < kMinCoherence) {
      continue;
    }
    const double w = 2.0 * std::numbers::pi * freq[k];
    const double weight = std::norm(frf.relative.gain[k]);
    wz2_sum += weight * -w * w * (frf.load.gain[k] / frf.relative.gain[k]).real();
    weight_sum += weight;
  }
  if (!(weight_sum > 0.0)) {
    throw std::runtime_error("fit_plant: no coherent bins near antiresonance");
  }
  const double wz2 = wz2_sum / weight_sum;

  // Rigid-body asymptote of the load channel, corrected for the resonance:
  // 1/G_l = -M_total w^2 (1 - w^2/wp^2). Bins well below the antiresonance
  // but above the hold loop's bandwidth carry the cleanest input power.
  double mass_sum = 0.0;
  std::size_t mass_used = 0;
  const double f_z_est = std::sqrt(wz2) / (2.0 * std::numbers::pi);
  for (std::size_t k = lo; k < hi; ++k) {
    if (freq[k] < 0.3 * f_z_est) continue;
    if (freq[k] > 0.7 * f_z_est) break;
    if (frf.load.coherence[k] < kMinCoherence) continue;
    const double w = 2.0 * std::numbers::pi * freq[k];
    mass_sum += -(1.0 / frf.load.gain[k]).real() / (w * w * (1.0 - w * w / wp2));
    ++mass_used;
  }
  if (mass_used == 0) throw std::runtime_error("fit_plant: no coherent low-frequency bins");

  PlantFit fit;
  fit.f_p = std::sqrt(wp2) / (2.0 * std::numbers::pi);
  fit.f_z = f_z_est;
  fit.total_mass = mass_sum / static_cast<double>(mass_used);
  if (!(fit.f_p > fit.f_z)) throw std::runtime_error("fit_plant: resonance below antiresonance");
  fit.params = params_from_frequencies(fit.f_p, fit.f_z, fit.total_mass);
  return fit;
}

IdentificationResult identify_plant(const PlantParams& truth, const IdentificationSettings& s) {
  if (s.decimation < 1) throw std::invalid_argument("identification decimation must be >= 1");
  Scenario scenario;
  scenario.feedforward.samples =
      prbs_signal(s.low, s.high, s.bit_period, s.settle + s.record, s.seed);
  scenario.feedforward.sample_period = s.bit_period;

  SimConfig sim = s.sim;
  sim.duration = s.settle + s.record;
  ControllerConfig hold;
  hold.variant = Variant::state_feedback_only;
  hold.nominal_motor_mass = truth.motor_mass;
  FeedbackGains gains{s.hold_kp, s.hold_kd, 0.0, 0.0};

  IdentificationResult result;
  result.trajectory = run_simulation(truth, hold, gains, scenario, sim);
  if (result.trajectory.diverged) {
    throw std::runtime_error("identification run diverged");
  }
  const auto& tr = result.trajectory;
  const auto first = static_cast<std::size_t>(std::llround(s.settle / sim.control_period));
  const std::size_t dec = static_cast<std::size_t>(s.decimation);
  const std::size_t blocks = (tr.size() - first) / dec;

  // Block averages over the ZOH force act as a mild anti-alias filter.
  std::vector<double> f(blocks), xm(blocks), xl(blocks), xr(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    double sf = 0, sm = 0, sl = 0;
    for (std::size_t j = 0; j < dec; ++j) {
      const std::size_t i = first + b * dec + j;
      sf += tr.f_applied[i];
      sm += tr.x_m[i];
      sl += tr.x_l[i];
    }
    f[b] = sf / static_cast<double>(dec);
    xm[b] = sm / static_cast<double>(dec);
    xl[b] = sl / static_cast<double>(dec);
    xr[b] = xm[b] - xl[b];
  }
  result.sample_period = sim.control_period * static_cast<double>(dec);
  WelchSettings welch = s.welch;
  while (welch.segment_length > blocks && welch.segment_length > 256) welch.segment_length /= 2;
  result.frf.motor = estimate_frequency_response(f, xm, result.sample_period, welch);
  result.frf.load = estimate_frequency_response(f, xl, result.sample_period, welch);
  result.frf.relative = estimate_frequency_response(f, xr, result.sample_period, welch);
  result.fit = fit_plant(result.frf);
  result.fit.params.force_coeff = truth.force_coeff;
  return result;
}

}  // namespace rrc
