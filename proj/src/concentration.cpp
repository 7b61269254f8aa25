#include "phiflow/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace phiflow::concentration {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> cell_nu_masses(const grid::ReferenceSystem& ref) {
  std::vector<double> m(ref.space.n());
  for (int i = 0; i < ref.space.n(); ++i) m[i] = ref.sigma[i] * ref.space.w()[i];
  return m;
}

/// Distance from every cell center to the nearest center in the set.
std::vector<double> distance_to_set(const grid::WeightedSpace& space,
                                    const std::vector<char>& set) {
  int n = space.n();
  double h = space.h();
  std::vector<double> dist(n, kInf);
  for (int i = 0; i < n; ++i)
    if (set[i]) dist[i] = 0.0;
  bool circle = space.topology() == grid::Topology::circle;
  int reps = circle ? 2 : 1;
  for (int rep = 0; rep < reps; ++rep) {
    for (int i = 0; i < n; ++i) {
      int j = (i - 1 + n) % n;
      if (!circle && i == 0) continue;
      dist[i] = std::min(dist[i], dist[j] + h);
    }
    for (int i = n - 1; i >= 0; --i) {
      int j = (i + 1) % n;
      if (!circle && i == n - 1) continue;
      dist[i] = std::min(dist[i], dist[j] + h);
    }
  }
  return dist;
}

}  // namespace

double alpha(const grid::ReferenceSystem& ref, double r) {
  const auto& space = ref.space;
  int n = space.n();
  auto mass = cell_nu_masses(ref);
  double reach = r * (1.0 + 1e-12) + 1e-15;
  int extend = static_cast<int>(std::floor(reach / space.h()));
  double best = 0.0;

  if (space.topology() == grid::Topology::segment) {
    std::vector<double> cum(n);
    std::partial_sum(mass.begin(), mass.end(), cum.begin());
    double total = cum[n - 1];
    for (int k = 0; k < n; ++k) {
      if (cum[k] >= 0.5 - 1e-12) {  // prefix cells 0..k
        double covered = cum[std::min(n - 1, k + extend)];
        best = std::max(best, total - covered);
      }
      double suffix = total - (k > 0 ? cum[k - 1] : 0.0);  // cells k..n-1
      if (suffix >= 0.5 - 1e-12) {
        double covered = total - (k - extend > 0 ? cum[k - extend - 1] : 0.0);
        best = std::max(best, total - covered);
      }
    }
    return best;
  }

  // Circle: every arc of every length, enlarged by `extend` cells both ways.
  std::vector<double> cum(2 * n + 1, 0.0);
  for (int i = 0; i < 2 * n; ++i) cum[i + 1] = cum[i] + mass[i % n];
  double total = cum[n];
  auto arc_mass = [&](int start, int len) {
    if (len >= n) return total;
    int s = ((start % n) + n) % n;
    return cum[s + len] - cum[s];
  };
  for (int start = 0; start < n; ++start) {
    for (int len = 1; len <= n; ++len) {
      if (arc_mass(start, len) < 0.5 - 1e-12) continue;
      double covered = arc_mass(start - extend, std::min(n, len + 2 * extend));
      best = std::max(best, total - covered);
    }
  }
  return best;
}

double alpha_bruteforce(const grid::ReferenceSystem& ref, double r) {
  const auto& space = ref.space;
  int n = space.n();
  if (n > 20) throw std::invalid_argument("alpha_bruteforce: limited to 20 cells");
  auto mass = cell_nu_masses(ref);
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);

  std::vector<std::uint32_t> nbr(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (space.distance(space.x()[i], space.x()[j]) <= r * (1.0 + 1e-12) + 1e-15)
        nbr[i] |= 1u << j;

  std::uint32_t top = 1u << n;
  std::vector<double> set_mass(top, 0.0);
  std::vector<std::uint32_t> grown(top, 0);
  for (std::uint32_t s = 1; s < top; ++s) {
    std::uint32_t low = s & (~s + 1u);
    int bit = __builtin_ctz(low);
    set_mass[s] = set_mass[s & (s - 1)] + mass[bit];
    grown[s] = grown[s & (s - 1)] | nbr[bit];
  }
  double best = 0.0;
  for (std::uint32_t s = 1; s < top; ++s)
    if (set_mass[s] >= 0.5 - 1e-12) best = std::max(best, total - set_mass[grown[s]]);
  return best;
}

double restricted_entropy(const grid::ReferenceSystem& ref, const std::vector<char>& subset) {
  const auto& space = ref.space;
  double t = 0.0;
  for (int i = 0; i < space.n(); ++i)
    if (subset[i]) t += ref.sigma[i] * space.w()[i];
  if (!(t > 0.0)) throw std::invalid_argument("restricted_entropy: subset carries no mass");
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    if (!subset[i] || !(ref.sigma[i] > 0.0)) continue;
    double xi = ref.sigma[i];
    double scaled = xi / t;
    total += (ref.calc.u(scaled) - scaled * ref.calc.ln(xi)) * space.w()[i];
  }
  return total;
}

double restricted_entropy_dual(const grid::ReferenceSystem& ref, const std::vector<char>& subset) {
  const auto& space = ref.space;
  double t = 0.0;
  for (int i = 0; i < space.n(); ++i)
    if (subset[i]) t += ref.sigma[i] * space.w()[i];
  if (!(t > 0.0)) throw std::invalid_argument("restricted_entropy: subset carries no mass");
  grid::Density cond;
  cond.rho.assign(space.n(), 0.0);
  for (int i = 0; i < space.n(); ++i)
    if (subset[i]) cond.rho[i] = ref.sigma[i] / t;
  return grid::entropy_H(ref, cond);
}

GeneralEstimate general_estimate(const grid::ReferenceSystem& ref, const std::vector<char>& A,
                                 double r, double K) {
  const auto& space = ref.space;
  GeneralEstimate out;
  auto dist = distance_to_set(space, A);
  std::vector<char> complement(space.n());
  double t = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    complement[i] = dist[i] > r * (1.0 + 1e-12) + 1e-15;
    if (complement[i]) t += ref.sigma[i] * space.w()[i];
  }
  out.complement_mass = t;
  double minus_hnu = std::max(0.0, -ref.H_nu);
  out.rhs = -0.5 * K * r * r + std::sqrt(2.0 * K * minus_hnu) * r;
  if (!(t > 0.0)) {
    out.trivial = true;
    out.lhs = -kInf;
    out.minus_restricted = -kInf;
    out.slack = kInf;
    return out;
  }

  double theta = ref.report.theta, delta = ref.report.delta;
  double xi0 = 1.0;
  for (double s : ref.sigma) xi0 = std::max(xi0, s);
  double integral = 0.0;
  for (int i = 0; i < space.n(); ++i)
    if (complement[i] && ref.sigma[i] > 0.0)
      integral += std::pow(ref.sigma[i], 2.0 - theta) * space.w()[i];

  out.lhs = std::pow(t, delta - 2.0) * ref.calc.ln(t) * std::pow(xi0, theta - delta) * integral;
  out.minus_restricted = -restricted_entropy(ref, complement);
  out.slack = out.rhs - out.lhs;
  return out;
}

NormalBound m_normal_bound(const grid::ReferenceSystem& ref, double K, double r) {
  namespace pf = phi::powerform;
  NormalBound out;
  double theta = ref.report.theta, delta = ref.report.delta;
  double xi0 = 1.0;
  for (double s : ref.sigma) xi0 = std::max(xi0, s);

  if (theta < 1.0 - 1e-12 && delta > 1e-12) {
    out.case_id = 1;
    out.applicable = true;
    double c = std::pow(delta * (1.0 - theta) / ((1.0 - delta) * (2.0 - delta)), 1.0 / (1.0 - delta));
    double inv = c * pf::exp_m(2.0 - delta, K * std::pow(xi0, delta - 1.0) * r * r / 4.0);
    out.alpha_upper = inv > 0.0 ? 1.0 / inv : 1.0;
    return out;
  }
  if (std::fabs(theta - 1.0) <= 1e-12 && delta > 0.5) {
    out.case_id = 3;
    out.applicable = true;
    double m = 3.0 - 2.0 * delta;
    double inv = pf::exp_m(m, -2.0 / (3.0 - 2.0 * delta)) *
                 pf::exp_m(m, K * std::pow(xi0, delta - 1.0) * r * r / 4.0);
    out.alpha_upper = inv > 0.0 ? 1.0 / inv : 1.0;
    return out;
  }
  bool finite_weight = std::isfinite(ref.space.total_weight());
  if (theta > 1.0 + 1e-12 && theta < 1.5 && delta > 3.0 * (theta - 1.0) && finite_weight &&
      2.0 * theta - delta - 1.0 > 1e-12 && 3.0 * theta - delta - 2.0 > 1e-12) {
    out.case_id = 2;
    out.applicable = true;
    double c = std::pow((theta - 1.0) * (3.0 - 3.0 * theta + delta) / (2.0 * theta - delta - 1.0),
                        1.0 / (1.0 - 2.0 * theta + delta));
    double arg = -0.5 * K * (theta - 1.0) / ((2.0 - theta) * (3.0 * theta - delta - 2.0)) *
                 std::pow(xi0, delta - theta) * std::pow(ref.space.total_weight(), 1.0 - theta) *
                 r * r;
    out.alpha_upper = c * pf::exp_m(2.0 * (1.0 - theta) + delta, arg);
    return out;
  }
  return out;
}

bool is_concave(const phi::PhiFunction& f, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logs(std::log(1e-3), std::log(1e3));
  for (int k = 0; k < trials; ++k) {
    double s1 = std::exp(logs(rng));
    double s2 = std::exp(logs(rng));
    double mid = 0.5 * (s1 + s2);
    double secant = 0.5 * (f(s1) + f(s2));
    if (f(mid) < secant - 1e-12 * std::max(1.0, secant)) return false;
  }
  return true;
}

double herbst_alpha_upper(const phi::PhiCalculus& calc, double K, double r) {
  double inv = calc.exp(calc.v(1.0) * K * r * r / 8.0);
  if (std::isinf(inv)) return 0.0;
  return inv > 1.0 ? 1.0 / inv : 1.0;
}

TrialSummary pointwise_entropy_trials(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick_m(1.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> logs(std::log(1e-3), std::log(1e2));
  TrialSummary out;
  out.trials = trials;
  out.worst_slack = kInf;
  for (int k = 0; k < trials; ++k) {
    phi::PhiFunction f = phi::PhiFunction::power(1.0);
    if (k % 5 == 4) {
      // Concave piecewise form: exponents decreasing across the knots.
      double p1 = 0.4 + 0.6 * unit(rng);
      double p2 = p1 * unit(rng);
      double p3 = p2 * unit(rng);
      std::vector<double> knots = {0.25, 1.0, 4.0, 16.0};
      std::vector<double> values = {std::pow(0.25, p1), 1.0, std::pow(4.0, p2),
                                    std::pow(4.0, p2) * std::pow(4.0, p3)};
      f = phi::PhiFunction::tabulated(knots, values);
    } else {
      f = phi::PhiFunction::power(2.0 - (2.0 - pick_m(rng)));  // m in [1,2]
    }
    phi::PhiCalculus calc(f);
    double a = calc.v(1.0);
    double s = std::exp(logs(rng));
    double lhs = calc.u(s) + a * s;
    double rhs = a * f(s) * calc.ln(s);
    double slack = (lhs - rhs) / std::max(1.0, std::fabs(rhs));
    out.worst_slack = std::min(out.worst_slack, slack);
    if (slack < -1e-9) ++out.failures;
  }
  return out;
}

TrialSummary exp_split_lower_trials(int trials, std::uint64_t seed) {
  namespace pf = phi::powerform;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick_m(1.0, 2.0 - 1e-9);
  std::uniform_real_distribution<double> pick_a(0.01, 3.0);
  std::uniform_real_distribution<double> pick_r(0.01, 5.0);
  TrialSummary out;
  out.trials = trials;
  out.worst_slack = kInf;
  for (int k = 0; k < trials; ++k) {
    double m = pick_m(rng), a = pick_a(rng), r = pick_r(rng);
    double lhs = pf::exp_m(m, (a * r - 1.0) * (a * r - 1.0) - 1.0);
    double rhs = pf::exp_m(m, -2.0 / m) * pf::exp_m(m, a * a * r * r / 2.0);
    if (std::isinf(lhs)) continue;
    double slack = (lhs - rhs) / std::max(1.0, std::fabs(rhs));
    out.worst_slack = std::min(out.worst_slack, slack);
    if (slack < -1e-9) ++out.failures;
  }
  return out;
}

TrialSummary exp_split_upper_trials(int trials, std::uint64_t seed) {
  namespace pf = phi::powerform;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> pick_a(0.01, 3.0);
  std::uniform_real_distribution<double> pick_r(0.01, 5.0);
  TrialSummary out;
  out.trials = trials;
  out.worst_slack = kInf;
  for (int k = 0; k < trials; ++k) {
    double mp = 0.51 + 0.48 * unit(rng);                    // m' in (1/2, 1)
    double lo = std::max(1.0 - mp + 1e-6, 0.05);
    double m = lo + (mp - lo) * unit(rng);                  // m <= m', m + m' > 1
    double a = pick_a(rng), r = pick_r(rng);
    double beta = 1.0 + (1.0 - mp) / (1.0 - m);
    double arg1 = -std::pow(a * r - 1.0 / std::sqrt(mp), 2.0) + 1.0 / mp;
    double lhs = pf::exp_m(m, arg1);
    double rhs = pf::exp_m(m, beta) *
                 pf::exp_m(m, -(1.0 - 1.0 / (beta * mp)) * a * a * r * r / (m + mp - 1.0));
    if (std::isinf(rhs)) continue;
    double slack = (rhs - lhs) / std::max(1.0, std::fabs(rhs));
    out.worst_slack = std::min(out.worst_slack, slack);
    if (slack < -1e-9) ++out.failures;
  }
  return out;
}

double entropy_inequality_slack(const grid::ReferenceSystem& ref, double K,
                                const std::vector<double>& w) {
  const auto& space = ref.space;
  if (static_cast<int>(w.size()) != space.n())
    throw std::invalid_argument("entropy_inequality_slack: observable size mismatch");
  double mean = 0.0;
  for (int i = 0; i < space.n(); ++i) mean += w[i] * ref.sigma[i] * space.w()[i];
  auto grad = grid::gradient(space, w);
  double lhs = -ref.calc.u(mean), rhs = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    if (!(ref.sigma[i] > 0.0)) continue;
    double dnu = ref.sigma[i] * space.w()[i];
    lhs += ref.calc.u(w[i]) * dnu;
    rhs += grad[i] * grad[i] / ref.calc.function()(w[i]) * dnu;
  }
  rhs /= 2.0 * K;
  return rhs - lhs;
}

std::vector<double> stiffening_alphas(const phi::PhiFunction& f, double r, int count,
                                      int n_cells) {
  std::vector<double> alphas;
  for (int i = 1; i <= count; ++i) {
    auto space = grid::WeightedSpace::segment(-8.0, 8.0, n_cells, [](double) { return 0.0; });
    std::vector<double> psi(n_cells);
    for (int j = 0; j < n_cells; ++j) psi[j] = 0.5 * i * space.x()[j] * space.x()[j];
    auto ref = grid::build_reference(space, f, psi);
    alphas.push_back(alpha(ref, r));
  }
  return alphas;
}

}  // namespace phiflow::concentration
