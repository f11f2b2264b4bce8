#pragma once

// Reference computations that share no code with the library.

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "rrc/plant.hpp"
#include "rrc/synthesis.hpp"

namespace oracle {

using Mat4 = Eigen::Matrix4d;

// x = (x_m, v_m, x_l, v_l); F enters the motor row.
inline Mat4 plant_matrix(const rrc::PlantParams& p) {
  Mat4 a = Mat4::Zero();
  a(0, 1) = 1.0;
  a(1, 0) = -p.spring_coeff / p.motor_mass;
  a(1, 2) = p.spring_coeff / p.motor_mass;
  a(2, 3) = 1.0;
  a(3, 0) = p.spring_coeff / p.load_mass;
  a(3, 2) = -p.spring_coeff / p.load_mass;
  return a;
}

inline Eigen::Vector4d force_input(const rrc::PlantParams& p) {
  return {0.0, 1.0 / p.motor_mass, 0.0, 0.0};
}

// Closed loop with an ideal observer (L = 1). Eliminating F_hat from
// F = K u + (1-K) F_hat gives:
//   motor-side observer:    F = K u + (1-K) Ks x_r
//   relative-side observer: F = K u + (1-K) Ks (Mm+Ml)/Ml x_r
inline Mat4 closed_loop_matrix(const rrc::PlantParams& p, rrc::Variant v, double K,
                               const rrc::FeedbackGains& g) {
  Eigen::RowVector4d u_row(-g.k_pm, -g.k_dm, -g.k_pl, -g.k_dl);
  Eigen::RowVector4d xr_row(1.0, 0.0, -1.0, 0.0);
  Eigen::RowVector4d force;
  switch (v) {
    case rrc::Variant::conventional_rrc:
      force = K * u_row + (1.0 - K) * p.spring_coeff * xr_row;
      break;
    case rrc::Variant::proposed_rrc:
      force = K * u_row + (1.0 - K) * p.spring_coeff * p.total_mass() / p.load_mass * xr_row;
      break;
    case rrc::Variant::state_feedback_only:
      force = u_row;
      break;
  }
  return plant_matrix(p) + force_input(p) * force;
}

// Faddeev-LeVerrier: returns (c3, c2, c1, c0) of det(sI - A) = s^4 + c3 s^3 + ...
inline std::array<double, 4> char_poly(const Mat4& a) {
  std::array<double, 4> c{};
  Mat4 m = Mat4::Zero();
  double prev = 1.0;
  for (int k = 1; k <= 4; ++k) {
    m = a * m + prev * Mat4::Identity();
    prev = -(a * m).trace() / k;
    c[k - 1] = prev;
  }
  return c;
}

// Gains giving (s + alpha)^4: coefficients are affine in the gains, so one
// 4x4 solve recovers them.
inline rrc::FeedbackGains solve_gains(const rrc::PlantParams& p, rrc::Variant v, double K,
                                      double alpha) {
  auto coeffs = [&](const Eigen::Vector4d& g) {
    const auto c = char_poly(closed_loop_matrix(p, v, K, {g[0], g[1], g[2], g[3]}));
    return Eigen::Vector4d(c[0], c[1], c[2], c[3]);
  };
  const Eigen::Vector4d c0 = coeffs(Eigen::Vector4d::Zero());
  Eigen::Matrix4d jac;
  const double scale[4] = {1e4, 1e2, 1e4, 1e2};
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e[i] = scale[i];
    jac.col(i) = (coeffs(e) - c0) / scale[i];
  }
  const double a2 = alpha * alpha;
  const Eigen::Vector4d target(4 * alpha, 6 * a2, 4 * a2 * alpha, a2 * a2);
  const Eigen::Vector4d g = jac.colPivHouseholderQr().solve(target - c0);
  return {g[0], g[1], g[2], g[3]};
}

// Largest real part among the roots of s^4 + c3 s^3 + c2 s^2 + c1 s + c0.
inline double max_real_root(double c3, double c2, double c1, double c0) {
  Mat4 comp = Mat4::Zero();
  comp(0, 0) = -c3;
  comp(0, 1) = -c2;
  comp(0, 2) = -c1;
  comp(0, 3) = -c0;
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  return comp.eigenvalues().real().maxCoeff();
}

// Position per unit force at s = j w from the state-space model.
inline std::complex<double> response(const rrc::PlantParams& p, int output_row_sign_mask,
                                     double w) {
  using C4 = Eigen::Matrix<std::complex<double>, 4, 4>;
  using V4 = Eigen::Matrix<std::complex<double>, 4, 1>;
  const C4 m = std::complex<double>(0.0, w) * C4::Identity() - plant_matrix(p).cast<std::complex<double>>();
  const V4 x = m.partialPivLu().solve(V4(force_input(p).cast<std::complex<double>>()));
  // mask: 1 -> x_m, 2 -> x_l, 3 -> x_m - x_l
  if (output_row_sign_mask == 1) return x[0];
  if (output_row_sign_mask == 2) return x[2];
  return x[0] - x[2];
}

// (s + a)^4 step response.
inline double quadruple_step(double alpha, double t) {
  const double x = alpha * t;
  return 1.0 - std::exp(-x) * (1.0 + x + x * x / 2.0 + x * x * x / 6.0);
}

// Time after which the quadruple-pole step stays within 2%, times alpha.
inline double quadruple_settling_x() {
  double lo = 1.0, hi = 30.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - quadruple_step(1.0, mid) > 0.02 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
