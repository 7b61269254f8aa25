#pragma once

#include <functional>
#include <vector>

#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"

namespace phiflow::flow {

/// Evolution problem: nonlinear diffusion with drift on a weighted space,
///   d(rho)/dt = div_w( grad v_phi(rho) + rho grad psi ),
/// the steepest-descent flow of the relative entropy in the transport metric.
struct Problem {
  grid::WeightedSpace space;
  phi::PhiFunction coefficient;
  std::function<double(double)> psi;   // potential and its derivative
  std::function<double(double)> dpsi;
  std::function<double(double)> f;     // log-weight and its derivative
  std::function<double(double)> df;
};

struct StepReport {
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  double w2_sq = 0.0;           // squared move of this step
  double objective_drop = 0.0;  // entropy_before - (entropy_after + w2_sq/(2 delta)) >= 0
  double kkt_residual = 0.0;    // projected-gradient first-order residual
  int iterations = 0;
  bool perturbations_ok = true;  // random feasible perturbations cannot improve
};

struct FlowResult {
  std::vector<double> times;                    // checkpoints, starting at 0
  std::vector<grid::Density> states;            // deposited on the grid
  std::vector<std::vector<double>> quantiles;   // solver state at each checkpoint
  std::vector<StepReport> steps;
  double lambda = 0.0;  // normalization shift of the potential
};

/// Minimizing-movement scheme in quantile coordinates: each step minimizes
/// H(mu) + W2(mu, mu_prev)^2 / (2 delta) over piecewise-linear quantile
/// functions with uniform mass panels, by projected descent (monotone
/// projection + box, Barzilai-Borwein steps, backtracking) to a first-order
/// residual of 1e-7.  Circles are opened at the left domain edge, which is
/// exact as long as no mass needs to cross that point.
FlowResult run_jko(const Problem& problem, const grid::Density& init, double T, double delta,
                   int panels, bool check_perturbations = false);

/// Conservative finite-volume verification route: explicit Euler with upwind
/// drift, no-flux (segment) or periodic (circle) boundaries, time step from
/// the usual stability bounds.  The diffusion coefficient is evaluated at
/// densities clamped below by 1e-8 so degenerate problems keep a finite step.
grid::Density pde_oracle_solve(const Problem& problem, const grid::Density& init, double T);

/// Exact heat evolution on the uniformly weighted circle for the classical
/// coefficient, by direct discrete Fourier transform.
grid::Density spectral_heat_solve(const grid::WeightedSpace& space, const grid::Density& init,
                                  double T);

/// Integral of |rho0 - rho1| against the weight.
double l1_distance(const grid::WeightedSpace& space, const grid::Density& d0,
                   const grid::Density& d1);

/// Entropy of a state as the scheme sees it (quantile quadrature).
double quantile_entropy(const Problem& problem, const std::vector<double>& quantiles,
                        double lambda);

/// Residual of the time-integrated weak form
///   int w dmu_T - int w dmu_0 = -int_0^T int (grad rho/phi(rho) + grad psi)
///                                 . grad w dmu dt
/// for a time-independent test function given with its derivative.
double weak_form_residual(const Problem& problem, const FlowResult& result,
                          const std::function<double(double)>& w,
                          const std::function<double(double)>& dw);

struct SlopeReport {
  double best_ratio = 0.0;   // max over probes of -dH/deps over the probe norm
  double fisher_sqrt = 0.0;  // square root of the information functional
  int best_probe = -1;       // index into the bank; the last probe is analytic
};
/// Local descending slope of the entropy against transport perturbations,
/// over a bank of velocity fields plus the analytic steepest direction.
SlopeReport slope_vs_fisher(const grid::ReferenceSystem& ref, const grid::Density& mu);

struct ContractionReport {
  std::vector<double> times;
  std::vector<double> ratios;  // W2(mu_t, nu_t) / (exp(-K t) W2(mu_0, nu_0))
  double worst = 0.0;
};
/// Exponential contraction of the flow map between two solutions.
ContractionReport contraction_report(const Problem& problem, const grid::Density& mu0,
                                     const grid::Density& nu0, double K, double T, double delta,
                                     int panels);

}  // namespace phiflow::flow
