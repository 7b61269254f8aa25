#pragma once

// Frozen reference values and closed forms used by the test suite.  These are
// written independently of the library code on purpose: the library computes
// everything through generic segmentwise machinery, while the oracles below
// spell out the textbook formulas for the power family and a few hand-derived
// constants.  Do not "simplify" by routing these through the library.

#include <cmath>
#include <limits>

namespace oracles {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- power family closed forms: phi_m(s) = s^(2-m), m in (0,2] ----

inline double ln_m(double m, double t) {
  if (m == 1.0) return std::log(t);
  return (std::pow(t, m - 1.0) - 1.0) / (m - 1.0);
}

inline double exp_m(double m, double tau) {
  if (m == 1.0) return std::exp(tau);
  const double base = 1.0 + (m - 1.0) * tau;
  if (base <= 0.0) return m > 1.0 ? 0.0 : kInf;
  return std::pow(base, 1.0 / (m - 1.0));
}

inline double u_m(double m, double r) {
  if (r == 0.0) return 0.0;
  if (m == 1.0) return r * std::log(r) - r;
  return (std::pow(r, m) - m * r) / (m * (m - 1.0));
}

inline double v_m(double m, double r) { return std::pow(r, m) / m; }

inline double l_m(double m) { return m > 1.0 ? 1.0 / (1.0 - m) : -kInf; }

inline double L_m(double m) { return m < 1.0 ? 1.0 / (1.0 - m) : kInf; }

inline double theta_m(double m) { return 2.0 - m; }

inline double N_m(double m) { return m == 1.0 ? kInf : 1.0 / (1.0 - m); }

// Displacement-convexity boundary: u_m lies in the class with parameter N
// exactly when m >= (N-1)/N.
inline double dc_boundary_m(double N) {
  return std::isinf(N) ? 1.0 : (N - 1.0) / N;
}

// ---- hand-derived frozen constants ----

// u for m = 0.5 at r = 2: (sqrt(2) - 0.5*2) / (0.5 * (0.5-1)) = -4(sqrt(2)-1).
inline constexpr double kU_m05_at2 = -1.6568542494923806;

// e_{1.5}(3) = [1 + 0.5*3]^2.
inline constexpr double kExp_m15_at3 = 6.25;

// Two-cell Kullback-Leibler example: masses (3/4, 1/4) against (1/2, 1/2):
// (3/4)ln(3/2) + (1/4)ln(1/2).
inline const double kKL_two_cell = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);

// ---- Gaussian facts ----

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Standard normal: P(X > 1) = 1 - Phi(1).
inline const double kNormalUpperTail1 = 1.0 - normal_cdf(1.0);

// For the quadratic-potential reference (unit curvature) and a mean-shifted
// copy by b: relative entropy difference b^2/2, quadratic transport cost b,
// information functional b^2.  Used to probe the equality cases.
inline double gauss_shift_entropy(double b) { return 0.5 * b * b; }
inline double gauss_shift_w2(double b) { return std::abs(b); }
inline double gauss_shift_fisher(double b) { return b * b; }

// Normalizing shift for exp(-(x^2/2 + lambda')) to integrate to one on the
// real line: density (2*pi)^(-1/2) exp(-x^2/2), i.e. the additive constant
// is log(sqrt(2*pi)).
inline const double kGaussLogZ = 0.5 * std::log(2.0 * M_PI);

// ---- circle heat closed form ----

// Mean-zero single mode a*cos(2*pi*k*x/L) decays by exp(-(2*pi*k/L)^2 * t).
inline double heat_mode_decay(double k, double L, double t) {
  const double w = 2.0 * M_PI * k / L;
  return std::exp(-w * w * t);
}

}  // namespace oracles
