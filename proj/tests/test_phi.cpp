#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phiflow/phi.hpp"

using phiflow::phi::PhiCalculus;
using phiflow::phi::PhiFunction;

namespace {

const double kRelTol = 1e-9;
const std::vector<double> kPowerIndices = {0.5, 0.75, 0.9, 1.0, 1.2, 1.5, 2.0};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double r = std::log(hi / lo);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(r * i / (n - 1.0));
  return g;
}

double rel_err(double got, double want) {
  if (std::isinf(want) || std::isinf(got)) return got == want ? 0.0 : oracles::kInf;
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Knot sampling of a pure power: log-log interpolation reproduces it exactly,
/// which exercises the multi-segment accumulation against closed forms.
PhiFunction sampled_power(double m, int knots = 9) {
  std::vector<double> s = log_grid(1e-2, 1e2, knots), vals(s.size());
  for (size_t i = 0; i < s.size(); ++i) vals[i] = std::pow(s[i], 2.0 - m);
  return PhiFunction::tabulated(s, vals);
}

}  // namespace

TEST_SUITE("phi") {

TEST_CASE("generalized log/exp/potential match power closed forms") {
  const auto ts = log_grid(1e-3, 1e3, 211);
  for (double m : kPowerIndices) {
    const PhiCalculus calc(PhiFunction::power(m));
    for (double t : ts) {
      CHECK(rel_err(calc.ln(t), oracles::ln_m(m, t)) < kRelTol);
      CHECK(rel_err(calc.v(t), oracles::v_m(m, t)) < kRelTol);
      CHECK(rel_err(calc.u(t), oracles::u_m(m, t)) < kRelTol);
      const double tau = oracles::ln_m(m, t);
      CHECK(rel_err(calc.exp(tau), t) < kRelTol);  // exp at interior points
    }
    CHECK(rel_err(calc.l(), oracles::l_m(m)) < 1e-12);
    CHECK(rel_err(calc.L(), oracles::L_m(m)) < 1e-12);
    CHECK(rel_err(calc.u1(), -1.0 / m) < kRelTol);
    CHECK(calc.domain_condition());
  }
}

TEST_CASE("round trips hold to 1e-9 on the working grid") {
  const auto ts = log_grid(1e-3, 1e3, 211);
  for (double m : kPowerIndices) {
    const PhiCalculus calc(PhiFunction::power(m));
    for (double t : ts) {
      CHECK(rel_err(calc.exp(calc.ln(t)), t) < kRelTol);
    }
  }
}

TEST_CASE("range endpoints clamp: zero below l, +inf at or above L") {
  const PhiCalculus half(PhiFunction::power(0.5));
  CHECK(half.L() == 2.0);
  CHECK(half.exp(3.0) == oracles::kInf);  // beyond the finite upper range
  CHECK(half.exp(2.0) == oracles::kInf);
  CHECK(std::isfinite(half.exp(1.999999)));

  const PhiCalculus stiff(PhiFunction::power(1.5));
  CHECK(stiff.l() == -2.0);
  CHECK(stiff.exp(-2.0) == 0.0);
  CHECK(stiff.exp(-5.0) == 0.0);
  CHECK(rel_err(stiff.exp(3.0), oracles::kExp_m15_at3) < kRelTol);
  CHECK(oracles::exp_m(1.5, 3.0) == oracles::kExp_m15_at3);
}

TEST_CASE("frozen potential value for the square-root coefficient") {
  const PhiCalculus calc(PhiFunction::power(0.5));
  CHECK(rel_err(calc.u(2.0), oracles::kU_m05_at2) < 1e-12);
}

TEST_CASE("order indices: exact equals 2-m, grid proxy agrees") {
  for (double m : kPowerIndices) {
    const PhiCalculus calc(PhiFunction::power(m));
    const auto exact = calc.order_indices();
    CHECK(exact.theta == doctest::Approx(2.0 - m).epsilon(1e-14));
    CHECK(exact.delta == doctest::Approx(2.0 - m).epsilon(1e-14));
    if (m == 1.0)
      CHECK(std::isinf(exact.N));
    else
      CHECK(exact.N == doctest::Approx(oracles::N_m(m)).epsilon(1e-12));
    const auto proxy = calc.order_indices_grid();
    CHECK(std::abs(proxy.theta - exact.theta) < 5e-6);
    CHECK(std::abs(proxy.delta - exact.delta) < 5e-6);
  }
}

TEST_CASE("positive rescaling divides the calculus, leaves indices fixed") {
  const double a = 2.7;
  const auto ts = log_grid(1e-2, 1e2, 41);
  for (double m : {0.75, 1.0, 1.5}) {
    const PhiCalculus base(PhiFunction::power(m));
    const PhiCalculus scaled(PhiFunction::power(m, a));
    for (double t : ts) {
      CHECK(rel_err(scaled.ln(t), base.ln(t) / a) < kRelTol);
      CHECK(rel_err(scaled.u(t), base.u(t) / a) < kRelTol);
      CHECK(rel_err(scaled.exp(base.ln(t) / a), t) < kRelTol);
    }
    CHECK(rel_err(scaled.l(), base.l() / a) < kRelTol);
    CHECK(rel_err(scaled.L(), base.L() / a) < kRelTol);
    CHECK(scaled.order_indices().theta == base.order_indices().theta);
    CHECK(scaled.order_indices().delta == base.order_indices().delta);
  }
}

TEST_CASE("convexity-class membership matches the m >= (N-1)/N rule") {
  const std::vector<double> Ns = {-4.0, -1.0, 2.0, 5.0, 20.0, oracles::kInf};
  for (double N : Ns) {
    const double boundary = oracles::dc_boundary_m(N);
    for (int k = 0; k <= 30; ++k) {
      const double m = std::min(0.5 + 0.05 * k, 2.0);
      if (std::abs(m - boundary) < 1e-6) continue;  // stay clear of the boundary
      const auto res = phiflow::phi::dc_membership(PhiCalculus(PhiFunction::power(m)), N);
      CHECK(res.member == (m >= boundary));
      if (res.member)
        CHECK(res.slack >= 0.0);
      else
        CHECK(res.slack < 0.0);
    }
  }
}

TEST_CASE("membership criterion supremum equals 1/m for powers") {
  for (double m : kPowerIndices) {
    const auto res = phiflow::phi::dc_membership(PhiCalculus(PhiFunction::power(m)), oracles::kInf);
    CHECK(res.criterion_sup == doctest::Approx(1.0 / m).epsilon(1e-12));
  }
}

TEST_CASE("tabulated interpolation of a power reproduces its calculus") {
  const auto ts = log_grid(1e-3, 1e3, 101);
  for (double m : {0.75, 1.2, 1.8}) {
    const PhiCalculus calc(sampled_power(m));
    for (double t : ts) {
      CHECK(rel_err(calc.ln(t), oracles::ln_m(m, t)) < kRelTol);
      CHECK(rel_err(calc.u(t), oracles::u_m(m, t)) < kRelTol);
      CHECK(rel_err(calc.exp(oracles::ln_m(m, t)), t) < kRelTol);
    }
    const auto oi = calc.order_indices();
    CHECK(oi.theta == doctest::Approx(2.0 - m).epsilon(1e-12));
    CHECK(oi.delta == doctest::Approx(2.0 - m).epsilon(1e-12));
  }
}

TEST_CASE("genuinely mixed tabulated coefficient: monotone, invertible, bounded") {
  // Elasticity 1.3 below s=1, elasticity 0.4 above it.
  const std::vector<double> s = {0.01, 1.0, 100.0};
  const std::vector<double> vals = {std::pow(0.01, 1.3), 1.0, std::pow(100.0, 0.4)};
  const PhiCalculus calc(PhiFunction::tabulated(s, vals));

  const auto oi = calc.order_indices();
  CHECK(oi.theta == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(oi.delta == doctest::Approx(0.4).epsilon(1e-12));

  const auto proxy = calc.order_indices_grid();
  CHECK(std::abs(proxy.theta - 1.3) < 5e-6);
  CHECK(std::abs(proxy.delta - 0.4) < 5e-6);

  CHECK(std::isinf(calc.l()));  // zero-tail elasticity above 1: divergent
  CHECK(std::isinf(calc.L()));  // infinity-tail elasticity below 1: divergent

  double prev = -oracles::kInf;
  for (double t : log_grid(1e-4, 1e4, 301)) {
    const double lv = calc.ln(t);
    CHECK(lv > prev);
    prev = lv;
    CHECK(rel_err(calc.exp(lv), t) < kRelTol);
  }

  const auto rep = phiflow::phi::verify_comparison_bounds(calc);
  CHECK(rep.max_violation <= 1e-6);
}

TEST_CASE("mixed tabulated coefficient with finite range endpoints") {
  // Elasticity 0.7 below s=1 (finite lower endpoint), 1.5 above (finite upper).
  const std::vector<double> s = {0.01, 1.0, 100.0};
  const std::vector<double> vals = {std::pow(0.01, 0.7), 1.0, std::pow(100.0, 1.5)};
  const PhiCalculus calc(PhiFunction::tabulated(s, vals));

  CHECK(calc.order_indices().theta == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(calc.order_indices().delta == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::isfinite(calc.l()));
  CHECK(std::isfinite(calc.L()));
  CHECK(calc.l() < 0.0);
  CHECK(calc.L() > 0.0);
  CHECK(calc.exp(calc.l() - 1.0) == 0.0);
  CHECK(calc.exp(calc.L()) == oracles::kInf);
  for (double t : log_grid(1e-3, 1e3, 101)) {
    CHECK(rel_err(calc.exp(calc.ln(t)), t) < kRelTol);
  }
  const auto rep = phiflow::phi::verify_comparison_bounds(calc);
  CHECK(rep.max_violation <= 1e-6);
}

TEST_CASE("quadrature and bracketing verification routes agree with the exact path") {
  std::vector<PhiCalculus> calcs;
  calcs.emplace_back(PhiFunction::power(0.75));
  calcs.emplace_back(PhiFunction::power(1.5));
  {
    const std::vector<double> s = {0.1, 1.0, 10.0};
    const std::vector<double> vals = {0.2, 1.0, 4.0};
    calcs.emplace_back(PhiFunction::tabulated(s, vals));
  }
  for (const auto& calc : calcs) {
    for (double t : log_grid(1e-3, 1e3, 25)) {
      CHECK(std::abs(calc.ln_quadrature(t) - calc.ln(t)) <=
            1e-9 * std::max(1.0, std::abs(calc.ln(t))));
      CHECK(std::abs(calc.v_quadrature(t) - calc.v(t)) <=
            1e-9 * std::max(1.0, std::abs(calc.v(t))));
      const double tau = calc.ln(t);
      CHECK(rel_err(calc.exp_bracketed(tau), calc.exp(tau)) < 1e-9);
    }
  }
}

TEST_CASE("comparison sandwich collapses to equality for pure powers") {
  for (double m : kPowerIndices) {
    const auto rep = phiflow::phi::verify_comparison_bounds(PhiCalculus(PhiFunction::power(m)));
    CHECK(rep.max_violation <= 1e-10);
    CHECK(rep.theta_side_applicable);
    CHECK(rep.delta_side_applicable);
  }
}

TEST_CASE("too-fast growth near zero invalidates the potential") {
  // Elasticity 2.5 below s=1 makes the flux integral diverge at zero.
  const std::vector<double> s = {0.01, 1.0, 10.0};
  const std::vector<double> vals = {std::pow(0.01, 2.5), 1.0, 10.0};
  const PhiCalculus calc(PhiFunction::tabulated(s, vals));
  CHECK(!calc.domain_condition());
  CHECK(std::isinf(calc.v(1.0)));
  CHECK_THROWS_AS(calc.u(1.0), std::domain_error);
}

TEST_CASE("constructor rejects malformed input") {
  CHECK_THROWS_AS(PhiFunction::power(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PhiFunction::power(2.5), std::invalid_argument);
  CHECK_THROWS_AS(PhiFunction::power(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(PhiFunction::tabulated({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PhiFunction::tabulated({1.0, 0.5}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(PhiFunction::tabulated({1.0, 2.0}, {1.0, -1.0}), std::invalid_argument);
}

}  // TEST_SUITE
