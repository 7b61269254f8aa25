#pragma once

#include <cstdint>
#include <vector>

#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"

namespace phiflow::concentration {

/// Concentration profile alpha(r) = sup{1 - nu[B(A,r)] : nu[A] >= 1/2} over
/// half-lines (segment) or arcs (circle); distances between cell centers.
double alpha(const grid::ReferenceSystem& ref, double r);

/// Same supremum over every subset of cells; exponential cost, n <= 20.
double alpha_bruteforce(const grid::ReferenceSystem& ref, double r);

/// Entropy of the conditional measure nu restricted to a subset, through the
/// two-argument integrand U(xi,t) = u(xi/t) - (xi/t) ln_phi(xi).
double restricted_entropy(const grid::ReferenceSystem& ref, const std::vector<char>& subset);
/// Verification route: entropy of the conditional density itself.
double restricted_entropy_dual(const grid::ReferenceSystem& ref, const std::vector<char>& subset);

/// The per-set inequality behind the concentration estimates.  For a set A
/// with nu[A] >= 1/2 and C the complement of its r-enlargement:
///   t^(delta-2) ln_phi(t) xi0^(theta-delta) int_C sigma^(2-theta) domega
///     <= -H(nu_C) <= -(sqrt(K/2) r - sqrt(-H_nu))^2 - H_nu,
/// with t = nu[C] and xi0 = max(1, max sigma).
struct GeneralEstimate {
  double lhs = 0.0;
  double minus_restricted = 0.0;  // middle link, -H(nu_C)
  double rhs = 0.0;
  double slack = 0.0;             // rhs - lhs
  double complement_mass = 0.0;
  bool trivial = false;           // empty complement: nothing to bound
};
GeneralEstimate general_estimate(const grid::ReferenceSystem& ref, const std::vector<char>& A,
                                 double r, double K);

/// Closed-form concentration bounds in the power scale of the order indices.
/// Case 1: theta < 1, delta > 0.  Case 2: theta in (1,3/2), delta > 3(theta-1),
/// finite total weight.  Case 3: theta = 1, delta > 1/2.  The value is an
/// upper bound for alpha(r).
struct NormalBound {
  int case_id = 0;
  bool applicable = false;
  double alpha_upper = 1.0;
};
NormalBound m_normal_bound(const grid::ReferenceSystem& ref, double K, double r);

/// Secant test for concavity of the coefficient on (0, infinity).
bool is_concave(const phi::PhiFunction& f, int trials = 500, std::uint64_t seed = 1);

/// Moment-style bound alpha(r) <= 1/exp_phi(v_phi(1) K r^2 / 8); requires a
/// concave coefficient with phi(1) = 1.
double herbst_alpha_upper(const phi::PhiCalculus& calc, double K, double r);

struct TrialSummary {
  int trials = 0;
  int failures = 0;
  double worst_slack = 0.0;  // minimum of (lhs-rhs) over trials, >= 0 when clean
};

/// Pointwise inequality u(s) + a s >= a phi(s) ln_phi(s), a = v_phi(1), for
/// concave coefficients with phi(1) = 1; randomized over s and the family.
TrialSummary pointwise_entropy_trials(int trials, std::uint64_t seed);

/// Product splittings of the deformed exponential used by the closed-form
/// bounds: the lower split for m in [1,2), the upper split for m, m' in (0,1).
TrialSummary exp_split_lower_trials(int trials, std::uint64_t seed);
TrialSummary exp_split_upper_trials(int trials, std::uint64_t seed);

/// Defect of int u(w) dnu - u(int w dnu) <= (1/2K) int |grad w|^2/phi(w) dnu
/// for a positive observable w (returns rhs - lhs).
double entropy_inequality_slack(const grid::ReferenceSystem& ref, double K,
                                const std::vector<double>& w);

/// Profile values alpha_i(r) for the family of references with potential
/// i * x^2 / 2, i = 1..count: stiffer wells concentrate harder.
std::vector<double> stiffening_alphas(const phi::PhiFunction& f, double r, int count, int n_cells);

}  // namespace phiflow::concentration
