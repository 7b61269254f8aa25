#pragma once

#include <functional>
#include <vector>

#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"

namespace phiflow::expfamily {

/// Parametric family nu_xi = exp_phi(lambda(xi) - <xi, X>) w for a vector of
/// statistics X, with lambda(xi) the normalizing shift.
struct Family {
  grid::WeightedSpace space;
  phi::PhiFunction coefficient;
  std::vector<std::vector<double>> stats;  // stats[j][i] = X_j(x_i)
};

Family make_family(const grid::WeightedSpace& space, const phi::PhiFunction& coefficient,
                   const std::vector<std::function<double(double)>>& statistics);

struct Member {
  std::vector<double> xi;
  grid::ReferenceSystem ref;  // carries lambda, the density, and the calculus
  std::vector<double> eta;    // moments of the member
};

Member member_at(const Family& family, const std::vector<double>& xi);

/// Moment vector int X dmu.
std::vector<double> moments(const Family& family, const grid::Density& mu);

/// Bregman divergence D(mu | nu_xi); +inf when mu charges cells the member
/// leaves empty and the calculus has no finite lower log-limit.
double divergence(const Family& family, const grid::Density& mu, const Member& member);

struct ProjectionReport {
  Member projection;
  double divergence_value = 0.0;
  double moment_residual = 0.0;  // max_j |eta_j(mu) - eta_j(nu*)|
  int iterations = 0;
  bool converged = false;
};

/// Divergence minimization over the parameter box by projected descent
/// (Barzilai-Borwein steps with backtracking) restarted from the box center
/// and corners; the analytic gradient is the moment gap, so convergence is
/// certified by the moment residual itself.
ProjectionReport bregman_project(const Family& family, const grid::Density& mu,
                                 const std::vector<double>& lo, const std::vector<double>& hi);

/// D(mu|outer) - D(mu|projection) - D(projection|outer); vanishes exactly at
/// a moment-matched projection.
double pythagoras_residual(const Family& family, const grid::Density& mu,
                           const Member& projection, const Member& outer);

}  // namespace phiflow::expfamily
