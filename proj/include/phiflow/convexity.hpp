#pragma once

#include <utility>
#include <vector>

#include "phiflow/grid.hpp"

namespace phiflow::convexity {

struct DeficitReport {
  std::vector<double> t;      // interpolation times, Chebyshev points inside (0,1)
  std::vector<double> slack;  // chord minus quadratic correction minus entropy
  double min_slack = 0.0;
  double w2 = 0.0;
};

/// Displacement K-convexity slack of the entropy along the geodesic between
/// mu0 and mu1: slack(t) = (1-t)H(mu0) + tH(mu1) - (K/2)t(1-t)W2^2 - H(mu_t).
/// Nonnegative slack at every t certifies the convexity inequality.
DeficitReport convexity_deficit(const grid::ReferenceSystem& ref, const grid::Density& mu0,
                                const grid::Density& mu1, double K, int points = 33);

/// Largest K in [lo, hi] (bisection, resolution 1e-6) keeping every sampled
/// slack above -tol across all pairs and interpolation times.
double estimate_K(const grid::ReferenceSystem& ref,
                  const std::vector<std::pair<grid::Density, grid::Density>>& pairs, double lo,
                  double hi, double tol, int points = 33);

struct DirectionalCheck {
  double numeric = 0.0;   // (H(mu_t) - H(mu_0))/t extrapolated to t = 0+
  double analytic = 0.0;  // integral of the entropy gradient field against the
                          // displacement of the optimal coupling
};
DirectionalCheck directional_derivative(const grid::ReferenceSystem& ref, const grid::Density& mu0,
                                        const grid::Density& mu1);

struct InequalityReport {
  double gap = 0.0;     // H(mu) - H(nu)
  double w2 = 0.0;      // distance to the reference
  double fisher = 0.0;  // information functional
  double talagrand_slack = 0.0;  // sqrt(2 gap / K) - W2
  double hwi_slack = 0.0;        // sqrt(I) W2 - (K/2) W2^2 - gap
  double lsi_slack = 0.0;        // I/(2K) - gap
};
InequalityReport functional_inequalities(const grid::ReferenceSystem& ref, const grid::Density& mu,
                                         double K);

struct PoincareReport {
  double lhs = 0.0;  // variance-type term: integral of w^2 sigma/phi(sigma) dnu
  double rhs = 0.0;  // (1/K) integral of |grad(w sigma/phi(sigma))|^2 dnu
  double slack = 0.0;
};
/// Linearized form of the entropy-information inequality; w is centered
/// against nu before evaluation.
PoincareReport poincare(const grid::ReferenceSystem& ref, const std::vector<double>& w, double K);

}  // namespace phiflow::convexity
