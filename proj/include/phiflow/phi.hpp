#pragma once

#include <limits>
#include <string>
#include <vector>

namespace phiflow::phi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Positive coefficient function on (0,inf), represented as a piecewise power
/// law in log-log coordinates.  A pure power phi(s) = a*s^(2-m) is a single
/// segment; a tabulated function interpolates its knots log-log linearly and
/// extrapolates the end segments to 0 and infinity.
class PhiFunction {
public:
  struct Segment {
    double s_lo;  // 0 for the first segment
    double s_hi;  // +inf for the last segment
    double c;     // phi(s) = c * s^p on [s_lo, s_hi]
    double p;     // local elasticity s*phi'(s)/phi(s)
  };

  static PhiFunction power(double m, double scale = 1.0);
  static PhiFunction tabulated(const std::vector<double>& s,
                               const std::vector<double>& values);

  double operator()(double s) const;
  /// Right-sided elasticity s*phi'(s+)/phi(s); piecewise constant.
  double elasticity(double s) const;

  bool is_power() const { return is_power_; }
  double power_m() const { return m_; }
  double scale() const { return scale_; }
  const std::vector<Segment>& segments() const { return segments_; }
  int segment_index(double s) const;

private:
  PhiFunction() = default;
  bool is_power_ = false;
  double m_ = 1.0;
  double scale_ = 1.0;
  std::vector<Segment> segments_;
};

struct OrderIndices {
  double theta;  // sup of elasticity
  double delta;  // inf of elasticity
  double N;      // 1/(theta-1), +inf when theta == 1
};

/// Integral calculus attached to one coefficient function: generalized
/// logarithm/exponential, the flux ("pressure") integral v, and the convex
/// potential u with u' = ln.  All integrals are exact segmentwise
/// antiderivatives; quadrature/bracketing variants are kept as an
/// independent verification route.
class PhiCalculus {
public:
  explicit PhiCalculus(const PhiFunction& f);

  const PhiFunction& function() const { return f_; }

  double ln(double t) const;     // strictly increasing, ln(1) = 0
  double exp(double tau) const;  // 0 below l(), +inf at or above L()
  double v(double r) const;      // integral of s/phi(s) over (0, r]
  double u(double r) const;      // r*ln(r) - v(r); u(0) = 0
  double h(double r) const;      // u(r), minus r*L() when L() is finite
  /// Derivative of h at the reference density written as a function of the
  /// (normalized) potential value: clamp(-psi, l, L) - (L finite ? L : 0).
  double h_prime_from_potential(double minus_psi) const;

  double l() const { return l_; }
  double L() const { return L_; }
  double u1() const { return -v1_; }  // u(1)
  /// Growth condition near zero making u well-defined (v(1) finite).
  bool domain_condition() const { return del_ok_; }

  OrderIndices order_indices() const { return exact_; }
  /// Spec'd estimation on a 512-point log grid with forward differences.
  OrderIndices order_indices_grid(int n = 512, double s_lo = 1e-4,
                                  double s_hi = 1e4) const;

  /// Verification route: adaptive composite 16-point Gauss-Legendre with
  /// interval splitting at the segment knots (absolute tolerance 1e-11).
  double ln_quadrature(double t) const;
  double v_quadrature(double r) const;
  /// Verification route: geometric bracketing plus bisection on ln().
  double exp_bracketed(double tau) const;

private:
  double prefix_ln(int seg, double s) const;  // anchored antiderivatives
  double prefix_v(int seg, double s) const;

  PhiFunction f_;
  OrderIndices exact_{};
  double l_ = -kInf;
  double L_ = kInf;
  double v1_ = 0.0;
  bool del_ok_ = true;
  std::vector<double> ln_at_knots_;  // ln at segment left endpoints (finite ones)
  std::vector<double> v_at_knots_;
};

struct DCResult {
  bool member;
  /// c_N - sup_t v(t)*phi(t)/t^2 with c_N = N/(N-1); nonnegative iff member.
  double slack;
  double criterion_sup;  // sup_t v(t)*phi(t)/t^2
};

/// Displacement-convexity class test for the potential u: exact for piecewise
/// power coefficients (the criterion ratio is monotone inside each segment,
/// so its supremum is attained at segment ends or asymptotic limits).
/// N may be any value in (-inf,0) or [1,+inf]; pass +inf for the dimensionless
/// class.
DCResult dc_membership(const PhiCalculus& calc, double N);

struct SandwichReport {
  double theta = 0.0, delta = 0.0;
  double max_violation_ln = 0.0;   // relative, positive = violated
  double max_violation_exp = 0.0;  // relative, positive = violated
  double max_violation = 0.0;
  bool theta_side_applicable = false;  // theta < 2
  bool delta_side_applicable = false;  // delta < 2
};

/// Checks the two-sided comparison of ln/exp against the matching power-law
/// forms with indices 2-theta and 2-delta on a log grid.
SandwichReport verify_comparison_bounds(const PhiCalculus& calc, int grid_n = 512,
                                        double t_lo = 1e-4, double t_hi = 1e4);

/// Closed forms for the pure power family, used by the CLI self-check.
namespace powerform {
double ln_m(double m, double t);
double exp_m(double m, double tau);  // [1+(m-1)tau]_+^{1/(m-1)}
double u_m(double m, double r);
double v_m(double m, double r);
double l_m(double m);
double L_m(double m);
}  // namespace powerform

}  // namespace phiflow::phi
