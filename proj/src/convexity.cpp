#include "phiflow/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "phiflow/transport.hpp"

namespace phiflow::convexity {

namespace {

std::vector<double> chebyshev_times(int points) {
  if (points < 1) throw std::invalid_argument("convexity: need at least one time");
  std::vector<double> t(points);
  for (int k = 0; k < points; ++k)
    t[k] = 0.5 * (1.0 - std::cos(M_PI * (k + 0.5) / points));
  return t;
}

}  // namespace

DeficitReport convexity_deficit(const grid::ReferenceSystem& ref, const grid::Density& mu0,
                                const grid::Density& mu1, double K, int points) {
  DeficitReport rep;
  rep.t = chebyshev_times(points);
  rep.w2 = transport::w2(ref.space, mu0, mu1);
  double h0 = grid::entropy_H(ref, mu0);
  double h1 = grid::entropy_H(ref, mu1);
  rep.slack.resize(rep.t.size());
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.t.size(); ++k) {
    double t = rep.t[k];
    auto mid = transport::displacement_interpolate(ref.space, mu0, mu1, t);
    double chord = (1.0 - t) * h0 + t * h1 - 0.5 * K * t * (1.0 - t) * rep.w2 * rep.w2;
    rep.slack[k] = chord - grid::entropy_H(ref, mid);
    rep.min_slack = std::min(rep.min_slack, rep.slack[k]);
  }
  return rep;
}

double estimate_K(const grid::ReferenceSystem& ref,
                  const std::vector<std::pair<grid::Density, grid::Density>>& pairs, double lo,
                  double hi, double tol, int points) {
  // The slack is affine decreasing in K, so cache the K-independent pieces
  // and bisect on the minimum.
  struct Sample {
    double base;
    double quad;
  };
  std::vector<Sample> samples;
  auto times = chebyshev_times(points);
  for (const auto& [mu0, mu1] : pairs) {
    double w = transport::w2(ref.space, mu0, mu1);
    double h0 = grid::entropy_H(ref, mu0);
    double h1 = grid::entropy_H(ref, mu1);
    for (double t : times) {
      auto mid = transport::displacement_interpolate(ref.space, mu0, mu1, t);
      double base = (1.0 - t) * h0 + t * h1 - grid::entropy_H(ref, mid);
      samples.push_back({base, 0.5 * t * (1.0 - t) * w * w});
    }
  }
  auto holds = [&](double K) {
    for (const auto& s : samples)
      if (s.base - K * s.quad < -tol) return false;
    return true;
  };
  if (!holds(lo)) return lo;
  if (holds(hi)) return hi;
  while (hi - lo > 1e-6) {
    double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

DirectionalCheck directional_derivative(const grid::ReferenceSystem& ref, const grid::Density& mu0,
                                        const grid::Density& mu1) {
  DirectionalCheck out;
  double h0 = grid::entropy_H(ref, mu0);
  auto rate = [&](double t) {
    auto mid = transport::displacement_interpolate(ref.space, mu0, mu1, t);
    return (grid::entropy_H(ref, mid) - h0) / t;
  };
  // The rate is close to affine in t near zero; extrapolate the two finest.
  double v1 = rate(1e-3), v2 = rate(1e-4);
  out.numeric = v2 - (v1 - v2) / 9.0;

  // Barycentric displacement of the monotone coupling, per source cell.
  const auto& space = ref.space;
  transport::AtomCloud c0 = transport::atoms(space, mu0);
  transport::AtomCloud c1 = transport::atoms(space, mu1);
  double m0 = std::accumulate(c0.mass.begin(), c0.mass.end(), 0.0);
  double m1 = std::accumulate(c1.mass.begin(), c1.mass.end(), 0.0);
  for (double& m : c0.mass) m /= m0;
  for (double& m : c1.mass) m /= m1;
  std::vector<double> cum0(c0.mass.size()), cum1(c1.mass.size());
  std::partial_sum(c0.mass.begin(), c0.mass.end(), cum0.begin());
  std::partial_sum(c1.mass.begin(), c1.mass.end(), cum1.begin());
  std::vector<double> target(c0.mass.size(), 0.0);
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < cum0.size() && j < cum1.size()) {
    double next = std::min(cum0[i], cum1[j]);
    target[i] += (next - u) * c1.pos[j];
    u = next;
    if (cum0[i] <= next) ++i;
    if (j < cum1.size() && cum1[j] <= next) ++j;
  }

  auto grad_rho = grid::gradient(space, mu0.rho);
  double total = 0.0;
  std::size_t atom = 0;
  for (int cell = 0; cell < space.n(); ++cell) {
    double mass = mu0.rho[cell] * space.w()[cell] / m0;
    if (!(mass > 0.0)) continue;
    double disp = target[atom] / c0.mass[atom] - space.x()[cell];
    double field = grad_rho[cell] / ref.calc.function()(mu0.rho[cell]) + ref.grad_psi[cell];
    total += field * disp * mass;
    ++atom;
  }
  out.analytic = total;
  return out;
}

InequalityReport functional_inequalities(const grid::ReferenceSystem& ref, const grid::Density& mu,
                                         double K) {
  InequalityReport rep;
  rep.gap = grid::entropy_H(ref, mu) - ref.H_nu;
  rep.w2 = transport::w2(ref.space, mu, ref.nu);
  rep.fisher = grid::fisher_I(ref, mu);
  rep.talagrand_slack = std::sqrt(2.0 * std::max(rep.gap, 0.0) / K) - rep.w2;
  rep.hwi_slack = std::sqrt(std::max(rep.fisher, 0.0)) * rep.w2 - 0.5 * K * rep.w2 * rep.w2 - rep.gap;
  rep.lsi_slack = rep.fisher / (2.0 * K) - rep.gap;
  return rep;
}

PoincareReport poincare(const grid::ReferenceSystem& ref, const std::vector<double>& w, double K) {
  const auto& space = ref.space;
  if (static_cast<int>(w.size()) != space.n())
    throw std::invalid_argument("poincare: observable size mismatch");
  double mean = 0.0;
  for (int i = 0; i < space.n(); ++i) mean += w[i] * ref.sigma[i] * space.w()[i];

  std::vector<double> field(space.n(), 0.0);
  PoincareReport rep;
  for (int i = 0; i < space.n(); ++i) {
    if (!ref.support[i]) continue;
    double centered = w[i] - mean;
    double ratio = ref.sigma[i] / ref.calc.function()(ref.sigma[i]);
    field[i] = centered * ratio;
    rep.lhs += centered * centered * ratio * ref.sigma[i] * space.w()[i];
  }
  auto grad = grid::gradient(space, field);
  for (int i = 0; i < space.n(); ++i) {
    if (!ref.support[i]) continue;
    rep.rhs += grad[i] * grad[i] * ref.sigma[i] * space.w()[i];
  }
  rep.rhs /= K;
  rep.slack = rep.rhs - rep.lhs;
  return rep;
}

}  // namespace phiflow::convexity
