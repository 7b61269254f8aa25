#include "phiflow/phi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phiflow::phi {

namespace {

/// Signed integral of s^(e-1) over [x, y].  Endpoints 0 and +inf are allowed
/// when the integral converges there; divergent cases return +inf.
double powint(double e, double x, double y) {
  if (x == y) return 0.0;
  if (e == 0.0) {
    if (x == 0.0 || std::isinf(y)) return kInf;
    return std::log(y / x);
  }
  if (x == 0.0) return e > 0.0 ? std::pow(y, e) / e : kInf;
  if (std::isinf(y)) return e < 0.0 ? -std::pow(x, e) / e : kInf;
  return std::pow(x, e) * std::expm1(e * std::log(y / x)) / e;
}

struct GaussLegendre16 {
  double node[16];
  double weight[16];
  GaussLegendre16() {
    // Nodes/weights on [-1,1] via Newton iteration on the Legendre recurrence.
    const int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 table;
  return table;
}

template <class F>
double gl16_panel(const F& f, double a, double b) {
  const GaussLegendre16& g = gl16();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += g.weight[i] * f(mid + half * g.node[i]);
  return s * half;
}

template <class F>
double adaptive_gl16(const F& f, double a, double b, double tol, int depth = 0) {
  const double whole = gl16_panel(f, a, b);
  const double mid = 0.5 * (a + b);
  const double split = gl16_panel(f, a, mid) + gl16_panel(f, mid, b);
  if (std::abs(split - whole) <= tol || depth > 40) return split;
  return adaptive_gl16(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_gl16(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

PhiFunction PhiFunction::power(double m, double scale) {
  if (!(m > 0.0) || !(m <= 2.0)) throw std::invalid_argument("power index m must lie in (0,2]");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive");
  PhiFunction f;
  f.is_power_ = true;
  f.m_ = m;
  f.scale_ = scale;
  f.segments_.push_back({0.0, kInf, scale, 2.0 - m});
  return f;
}

PhiFunction PhiFunction::tabulated(const std::vector<double>& s,
                                   const std::vector<double>& values) {
  if (s.size() != values.size() || s.size() < 2)
    throw std::invalid_argument("tabulated coefficient needs >= 2 knots");
  for (size_t k = 0; k < s.size(); ++k) {
    if (!(s[k] > 0.0) || !(values[k] > 0.0))
      throw std::invalid_argument("tabulated knots and values must be positive");
    if (k > 0 && !(s[k] > s[k - 1]))
      throw std::invalid_argument("tabulated knots must be strictly increasing");
  }
  PhiFunction f;
  f.is_power_ = false;
  f.scale_ = 1.0;
  const size_t K = s.size();
  f.segments_.reserve(K - 1);
  for (size_t k = 0; k + 1 < K; ++k) {
    const double p = std::log(values[k + 1] / values[k]) / std::log(s[k + 1] / s[k]);
    const double c = values[k] / std::pow(s[k], p);
    const double lo = (k == 0) ? 0.0 : s[k];
    const double hi = (k + 2 == K) ? kInf : s[k + 1];
    f.segments_.push_back({lo, hi, c, p});
  }
  return f;
}

int PhiFunction::segment_index(double s) const {
  int lo = 0, hi = static_cast<int>(segments_.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (s >= segments_[mid].s_lo)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

double PhiFunction::operator()(double s) const {
  if (std::isnan(s)) return s;
  if (s < 0.0) throw std::domain_error("coefficient function evaluated at negative argument");
  const Segment& seg = segments_[s == 0.0 ? 0 : segment_index(s)];
  return seg.c * std::pow(s, seg.p);
}

double PhiFunction::elasticity(double s) const {
  return segments_[segment_index(s)].p;
}

PhiCalculus::PhiCalculus(const PhiFunction& f) : f_(f) {
  const auto& segs = f_.segments();
  const int S = static_cast<int>(segs.size());
  double theta = -kInf, delta = kInf;
  for (const auto& seg : segs) {
    theta = std::max(theta, seg.p);
    delta = std::min(delta, seg.p);
  }
  exact_.theta = theta;
  exact_.delta = delta;
  exact_.N = (theta == 1.0) ? kInf : 1.0 / (theta - 1.0);

  // Knot grid t_0 = 0 < t_1 < ... < t_{S-1} < t_S = +inf with exact
  // antiderivative values accumulated on it.
  std::vector<double> knot(S + 1);
  knot[0] = 0.0;
  for (int k = 1; k < S; ++k) knot[k] = segs[k].s_lo;
  knot[S] = kInf;

  v_at_knots_.assign(S + 1, 0.0);
  for (int k = 0; k < S; ++k)
    v_at_knots_[k + 1] =
        v_at_knots_[k] + powint(2.0 - segs[k].p, knot[k], knot[k + 1]) / segs[k].c;

  ln_at_knots_.assign(S + 1, 0.0);
  const int j1 = f_.segment_index(1.0);
  if (j1 + 1 <= S)
    ln_at_knots_[j1 + 1] = powint(1.0 - segs[j1].p, 1.0, knot[j1 + 1]) / segs[j1].c;
  for (int k = j1 + 1; k < S; ++k)
    ln_at_knots_[k + 1] =
        ln_at_knots_[k] + powint(1.0 - segs[k].p, knot[k], knot[k + 1]) / segs[k].c;
  ln_at_knots_[j1] = -powint(1.0 - segs[j1].p, knot[j1], 1.0) / segs[j1].c;
  for (int k = j1 - 1; k >= 0; --k)
    ln_at_knots_[k] =
        ln_at_knots_[k + 1] - powint(1.0 - segs[k].p, knot[k], knot[k + 1]) / segs[k].c;

  l_ = ln_at_knots_[0];
  L_ = ln_at_knots_[S];
  v1_ = v(1.0);
  del_ok_ = std::isfinite(v1_);
}

double PhiCalculus::ln(double t) const {
  if (std::isnan(t)) return t;
  if (t <= 0.0) return l_;
  if (std::isinf(t)) return L_;
  const auto& segs = f_.segments();
  const int S = static_cast<int>(segs.size());
  const int j = f_.segment_index(t);
  if (j == 0) {
    if (S == 1) return powint(1.0 - segs[0].p, 1.0, t) / segs[0].c;
    return ln_at_knots_[1] - powint(1.0 - segs[0].p, t, segs[1].s_lo) / segs[0].c;
  }
  return ln_at_knots_[j] + powint(1.0 - segs[j].p, segs[j].s_lo, t) / segs[j].c;
}

double PhiCalculus::v(double r) const {
  if (std::isnan(r)) return r;
  if (r <= 0.0) return 0.0;
  const auto& segs = f_.segments();
  const int j = std::isinf(r) ? static_cast<int>(segs.size()) - 1 : f_.segment_index(r);
  const double lo = (j == 0) ? 0.0 : segs[j].s_lo;
  return v_at_knots_[j] + powint(2.0 - segs[j].p, lo, r) / segs[j].c;
}

double PhiCalculus::u(double r) const {
  if (!del_ok_)
    throw std::domain_error("potential u undefined: coefficient grows too fast near zero");
  if (std::isnan(r)) return r;
  if (r <= 0.0) return 0.0;
  return r * ln(r) - v(r);
}

double PhiCalculus::h(double r) const {
  const double base = u(r);
  return std::isfinite(L_) ? base - r * L_ : base;
}

double PhiCalculus::h_prime_from_potential(double minus_psi) const {
  const double t = std::min(std::max(minus_psi, l_), L_);
  return std::isfinite(L_) ? t - L_ : t;
}

double PhiCalculus::exp(double tau) const {
  if (std::isnan(tau)) return tau;
  if (tau <= l_) return 0.0;
  if (tau >= L_) return kInf;
  const auto& segs = f_.segments();
  const int S = static_cast<int>(segs.size());
  // Largest interior knot index k in [1, S-1] with ln(knot_k) <= tau.
  int j = 0;
  {
    int lo = 1, hi = S - 1;
    while (lo <= hi) {
      const int mid = (lo + hi) / 2;
      if (ln_at_knots_[mid] <= tau) {
        j = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
  }
  double anchor, ln_anchor;
  if (j == 0 && S > 1) {
    anchor = segs[1].s_lo;
    ln_anchor = ln_at_knots_[1];
  } else if (S == 1) {
    anchor = 1.0;
    ln_anchor = 0.0;
  } else {
    anchor = segs[j].s_lo;
    ln_anchor = ln_at_knots_[j];
  }
  const double c = segs[j].c, p = segs[j].p;
  const double d = tau - ln_anchor;
  double t;
  if (p == 1.0) {
    t = anchor * std::exp(c * d);
  } else {
    const double e = 1.0 - p;
    const double base = std::pow(anchor, e) + e * c * d;
    if (base <= 0.0) return e > 0.0 ? 0.0 : kInf;
    t = std::pow(base, 1.0 / e);
  }
  const double lo = segs[j].s_lo, hi = segs[j].s_hi;
  if (t < lo) t = lo;
  if (t > hi) t = hi;
  return t;
}

OrderIndices PhiCalculus::order_indices_grid(int n, double s_lo, double s_hi) const {
  double theta = -kInf, delta = kInf;
  const double ratio = std::log(s_hi / s_lo);
  for (int i = 0; i < n; ++i) {
    const double s = s_lo * std::exp(ratio * i / (n - 1.0));
    const double hstep = 1e-6 * s;
    const double q = (f_(s + hstep) - f_(s)) / hstep;
    const double el = s * q / f_(s);
    theta = std::max(theta, el);
    delta = std::min(delta, el);
  }
  OrderIndices out;
  out.theta = theta;
  out.delta = delta;
  out.N = (theta == 1.0) ? kInf : 1.0 / (theta - 1.0);
  return out;
}

double PhiCalculus::ln_quadrature(double t) const {
  if (t <= 0.0) return l_;
  const double a = std::min(1.0, t), b = std::max(1.0, t);
  std::vector<double> cut{a};
  for (const auto& seg : f_.segments())
    if (seg.s_lo > a && seg.s_lo < b) cut.push_back(seg.s_lo);
  cut.push_back(b);
  std::sort(cut.begin(), cut.end());
  static const double tol_abs = 1e-11;
  double total = 0.0;
  const auto integrand = [this](double s) { return 1.0 / f_(s); };
  for (size_t k = 0; k + 1 < cut.size(); ++k)
    total += adaptive_gl16(integrand, cut[k], cut[k + 1], tol_abs / (cut.size() - 1));
  return t >= 1.0 ? total : -total;
}

double PhiCalculus::v_quadrature(double r) const {
  if (r <= 0.0) return 0.0;
  // Analytic near-zero tail from a local power fit, quadrature above it.
  const double t0 = r * 1e-6;
  const double p = f_.elasticity(t0);
  const double c = f_(t0) / std::pow(t0, p);
  const double tail = powint(2.0 - p, 0.0, t0) / c;
  if (!std::isfinite(tail)) return kInf;
  std::vector<double> cut{t0};
  for (const auto& seg : f_.segments())
    if (seg.s_lo > t0 && seg.s_lo < r) cut.push_back(seg.s_lo);
  cut.push_back(r);
  std::sort(cut.begin(), cut.end());
  static const double tol_abs = 1e-11;
  double total = tail;
  const auto integrand = [this](double s) { return s / f_(s); };
  for (size_t k = 0; k + 1 < cut.size(); ++k)
    total += adaptive_gl16(integrand, cut[k], cut[k + 1], tol_abs / (cut.size() - 1));
  return total;
}

double PhiCalculus::exp_bracketed(double tau) const {
  if (std::isnan(tau)) return tau;
  if (tau <= l_) return 0.0;
  if (tau >= L_) return kInf;
  double lo = 1.0, hi = 1.0;
  if (tau >= 0.0) {
    while (ln(hi) < tau) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return kInf;
    }
  } else {
    while (ln(lo) > tau) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return 0.0;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = ln(mid);
    if (std::abs(val - tau) <= 1e-13 * std::max(1.0, std::abs(tau))) return mid;
    if (val < tau)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

DCResult dc_membership(const PhiCalculus& calc, double N) {
  double cN;
  if (std::isinf(N))
    cN = 1.0;
  else if (N == 1.0)
    cN = kInf;
  else
    cN = N / (N - 1.0);

  // sup over t of v(t)*phi(t)/t^2.  The ratio is monotone inside each power
  // segment, so the supremum is realized at segment boundaries or in the
  // limits t -> 0, t -> inf.
  const auto& segs = calc.function().segments();
  double sup = -kInf;
  if (!calc.domain_condition()) {
    sup = kInf;
  } else {
    const double p0 = segs.front().p;
    sup = std::max(sup, 1.0 / (2.0 - p0));  // t -> 0 limit (constant on segment 0)
    const double q = segs.back().p;
    sup = std::max(sup, q < 2.0 ? 1.0 / (2.0 - q) : kInf);  // t -> inf limit
    for (size_t k = 1; k < segs.size(); ++k) {
      const double b = segs[k].s_lo;
      const double phi_b = calc.function()(b);
      sup = std::max(sup, calc.v(b) * phi_b / (b * b));
    }
  }
  DCResult out;
  out.criterion_sup = sup;
  out.slack = cN - sup;  // +inf - finite handled by IEEE rules
  if (std::isinf(cN) && std::isinf(sup))
    out.slack = -kInf;  // divergent criterion never admits membership
  out.member = std::isinf(cN) ? std::isfinite(sup) || sup == -kInf : sup <= cN;
  if (std::isinf(sup) && sup > 0) out.member = false;
  return out;
}

SandwichReport verify_comparison_bounds(const PhiCalculus& calc, int grid_n, double t_lo,
                                        double t_hi) {
  SandwichReport rep;
  const OrderIndices oi = calc.order_indices();
  rep.theta = oi.theta;
  rep.delta = oi.delta;
  rep.theta_side_applicable = oi.theta < 2.0;
  rep.delta_side_applicable = oi.delta < 2.0;
  const double phi1 = calc.function()(1.0);
  const double m_th = 2.0 - oi.theta;
  const double m_dl = 2.0 - oi.delta;

  auto rel_excess = [](double amount, double scale) {
    return amount / std::max(1.0, scale);
  };

  const double lr = std::log(t_hi / t_lo);
  for (int i = 0; i < grid_n; ++i) {
    const double t = t_lo * std::exp(lr * i / (grid_n - 1.0));
    const double lnv = calc.ln(t);
    const double phit = calc.function()(t);
    if (rep.theta_side_applicable) {
      const double ell = powerform::ln_m(m_th, t);
      const double lower = ell / phi1;
      const double upper = std::pow(t, oi.theta) / phit * ell;
      const double scale = std::max({std::abs(lnv), std::abs(lower), std::abs(upper)});
      rep.max_violation_ln =
          std::max(rep.max_violation_ln, rel_excess(lower - lnv, scale));
      rep.max_violation_ln =
          std::max(rep.max_violation_ln, rel_excess(lnv - upper, scale));
    }
    if (rep.delta_side_applicable) {
      const double ell = powerform::ln_m(m_dl, t);
      const double lower = std::pow(t, oi.delta) / phit * ell;
      const double upper = ell / phi1;
      const double scale = std::max({std::abs(lnv), std::abs(lower), std::abs(upper)});
      rep.max_violation_ln =
          std::max(rep.max_violation_ln, rel_excess(lower - lnv, scale));
      rep.max_violation_ln =
          std::max(rep.max_violation_ln, rel_excess(lnv - upper, scale));
    }
  }

  // Exponential side on an r-grid inside the common finite window.
  double r_lo = std::isfinite(calc.l()) ? calc.l() + 1e-6 * (1.0 + std::abs(calc.l())) : -30.0;
  double r_hi = std::isfinite(calc.L()) ? calc.L() - 1e-6 * (1.0 + std::abs(calc.L())) : 30.0;
  for (int i = 0; i < grid_n; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (grid_n - 1.0);
    const double ev = calc.exp(r);
    if (rep.theta_side_applicable) {
      const double upper = powerform::exp_m(m_th, phi1 * r);
      if (std::isfinite(ev) && std::isfinite(upper)) {
        const double scale = std::max(std::abs(ev), std::abs(upper));
        rep.max_violation_exp = std::max(rep.max_violation_exp, rel_excess(ev - upper, scale));
      } else if (std::isinf(ev) && std::isfinite(upper)) {
        rep.max_violation_exp = kInf;
      }
    }
    if (rep.delta_side_applicable) {
      const double lower = powerform::exp_m(m_dl, phi1 * r);
      if (std::isfinite(ev) && std::isfinite(lower)) {
        const double scale = std::max(std::abs(ev), std::abs(lower));
        rep.max_violation_exp = std::max(rep.max_violation_exp, rel_excess(lower - ev, scale));
      } else if (std::isinf(lower) && std::isfinite(ev)) {
        rep.max_violation_exp = kInf;
      }
    }
  }
  rep.max_violation = std::max(rep.max_violation_ln, rep.max_violation_exp);
  return rep;
}

namespace powerform {

double ln_m(double m, double t) {
  if (t < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (m == 1.0) return std::log(t);
  if (t == 0.0) return m > 1.0 ? -1.0 / (m - 1.0) : -kInf;
  return std::expm1((m - 1.0) * std::log(t)) / (m - 1.0);
}

double exp_m(double m, double tau) {
  if (std::isnan(tau)) return tau;
  if (m == 1.0) return std::exp(tau);
  const double base = 1.0 + (m - 1.0) * tau;
  if (m > 1.0) {
    if (base <= 0.0) return 0.0;
    return std::pow(base, 1.0 / (m - 1.0));
  }
  if (base <= 0.0) return kInf;  // tau at or beyond the finite upper bound
  return std::pow(base, 1.0 / (m - 1.0));
}

double u_m(double m, double r) {
  if (r <= 0.0) return 0.0;
  if (m == 1.0) return r * std::log(r) - r;
  return (std::pow(r, m) - m * r) / (m * (m - 1.0));
}

double v_m(double m, double r) {
  if (r <= 0.0) return 0.0;
  return std::pow(r, m) / m;
}

double l_m(double m) { return m > 1.0 ? -1.0 / (m - 1.0) : -kInf; }

double L_m(double m) { return m < 1.0 ? 1.0 / (1.0 - m) : kInf; }

}  // namespace powerform

}  // namespace phiflow::phi
