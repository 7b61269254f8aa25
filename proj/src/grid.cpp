#include "phiflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phiflow::grid {

namespace {

double checked(double value, const char* what) {
  if (std::isnan(value)) throw std::invalid_argument(std::string("NaN in ") + what);
  return value;
}

}  // namespace

WeightedSpace WeightedSpace::segment(double a, double b, int n_cells,
                                     const std::function<double(double)>& f) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("space needs finite a < b");
  if (n_cells < 8) throw std::invalid_argument("space needs at least 8 cells");
  WeightedSpace s;
  s.topology_ = Topology::segment;
  s.a_ = a;
  s.b_ = b;
  s.h_ = (b - a) / n_cells;
  s.x_.resize(n_cells);
  s.f_.resize(n_cells);
  s.w_.resize(n_cells);
  s.f_face_.resize(n_cells + 1);
  for (int i = 0; i < n_cells; ++i) {
    s.x_[i] = a + (i + 0.5) * s.h_;
    s.f_[i] = checked(f(s.x_[i]), "weight exponent");
    s.w_[i] = std::exp(-s.f_[i]) * s.h_;
    s.total_weight_ += s.w_[i];
  }
  for (int i = 0; i <= n_cells; ++i) s.f_face_[i] = checked(f(a + i * s.h_), "weight exponent");
  return s;
}

WeightedSpace WeightedSpace::circle(double a, double b, int n_cells,
                                    const std::function<double(double)>& f) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("space needs finite a < b");
  if (n_cells < 8) throw std::invalid_argument("space needs at least 8 cells");
  WeightedSpace s;
  s.topology_ = Topology::circle;
  s.a_ = a;
  s.b_ = b;
  s.h_ = (b - a) / n_cells;
  s.x_.resize(n_cells);
  s.f_.resize(n_cells);
  s.w_.resize(n_cells);
  s.f_face_.resize(n_cells);
  for (int i = 0; i < n_cells; ++i) {
    s.x_[i] = a + (i + 0.5) * s.h_;
    s.f_[i] = checked(f(s.x_[i]), "weight exponent");
    s.w_[i] = std::exp(-s.f_[i]) * s.h_;
    s.total_weight_ += s.w_[i];
  }
  for (int i = 0; i < n_cells; ++i) s.f_face_[i] = checked(f(a + i * s.h_), "weight exponent");
  return s;
}

double WeightedSpace::distance(double x, double y) const {
  double d = std::abs(x - y);
  if (topology_ == Topology::circle) {
    const double len = length();
    d = std::fmod(d, len);
    d = std::min(d, len - d);
  }
  return d;
}

WeightedSpace WeightedSpace::with_f_shift(double shift) const {
  WeightedSpace out = *this;
  const double factor = std::exp(-shift);
  out.total_weight_ = 0.0;
  for (int i = 0; i < n(); ++i) {
    out.f_[i] += shift;
    out.w_[i] *= factor;
    out.total_weight_ += out.w_[i];
  }
  for (auto& v : out.f_face_) v += shift;
  return out;
}

std::vector<double> WeightedSpace::sample(const std::function<double(double)>& g) const {
  std::vector<double> out(x_.size());
  for (size_t i = 0; i < x_.size(); ++i) out[i] = checked(g(x_[i]), "sampled function");
  return out;
}

Density density_from_values(const WeightedSpace& space, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != space.n())
    throw std::invalid_argument("density values must match the cell count");
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
      throw std::invalid_argument("density values must be finite and nonnegative");
    total += values[i] * space.w()[i];
  }
  if (!(total > 0.0)) throw std::invalid_argument("density values must carry positive mass");
  Density d;
  d.rho.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) d.rho[i] = values[i] / total;
  return d;
}

double mass(const WeightedSpace& space, const Density& d) {
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) total += d.rho[i] * space.w()[i];
  return total;
}

std::vector<double> cell_masses(const WeightedSpace& space, const Density& d) {
  std::vector<double> m(space.n());
  for (int i = 0; i < space.n(); ++i) m[i] = d.rho[i] * space.w()[i];
  return m;
}

std::vector<double> gradient(const WeightedSpace& space, const std::vector<double>& g) {
  const int n = space.n();
  const double h = space.h();
  std::vector<double> out(n);
  if (space.topology() == Topology::circle) {
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      out[i] = (g[ip] - g[im]) / (2.0 * h);
    }
  } else {
    out[0] = (g[1] - g[0]) / h;
    out[n - 1] = (g[n - 1] - g[n - 2]) / h;
    for (int i = 1; i + 1 < n; ++i) out[i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
  }
  return out;
}

std::vector<double> second_difference(const WeightedSpace& space, const std::vector<double>& g) {
  const int n = space.n();
  const double h2 = space.h() * space.h();
  std::vector<double> out(n);
  if (space.topology() == Topology::circle) {
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      out[i] = (g[ip] - 2.0 * g[i] + g[im]) / h2;
    }
  } else {
    for (int i = 1; i + 1 < n; ++i) out[i] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / h2;
    out[0] = out[1];
    out[n - 1] = out[n - 2];
  }
  return out;
}

double normalize_potential(const WeightedSpace& space, const phi::PhiCalculus& calc,
                           const std::vector<double>& psi_raw) {
  if (static_cast<int>(psi_raw.size()) != space.n())
    throw std::invalid_argument("potential values must match the cell count");
  const double psi_min = *std::min_element(psi_raw.begin(), psi_raw.end());
  const auto total = [&](double lam) {
    double s = 0.0;
    for (int i = 0; i < space.n(); ++i) {
      s += calc.exp(lam - psi_raw[i]) * space.w()[i];
      if (std::isinf(s)) return s;
    }
    return s;
  };

  double lo = std::isfinite(calc.l()) ? calc.l() + psi_min : psi_min - 1.0;
  for (int k = 0; total(lo) >= 1.0; ++k) {
    lo -= std::pow(2.0, k);
    if (k > 60) throw std::runtime_error("normalization: no lower bracket");
  }
  double hi;
  if (std::isfinite(calc.L())) {
    const double top = calc.L() + psi_min;
    double eps = std::max(1.0, std::abs(top));
    hi = top - eps;
    while (total(hi) < 1.0) {
      eps *= 0.5;
      hi = top - eps;
      if (eps < 1e-300) throw std::runtime_error("normalization: no upper bracket");
    }
  } else {
    hi = psi_min + 1.0;
    for (int k = 0; total(hi) < 1.0; ++k) {
      hi += std::pow(2.0, k);
      if (k > 60) throw std::runtime_error("normalization: no upper bracket");
    }
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) >= 1.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(hi))) break;
  }
  const double lam = std::abs(total(hi) - 1.0) < std::abs(total(lo) - 1.0) ? hi : lo;
  static const double mass_tol = 1e-10;
  if (std::abs(total(lam) - 1.0) > mass_tol)
    throw std::runtime_error("normalization did not reach unit mass");
  return lam;
}

ReferenceSystem build_reference(const WeightedSpace& space, const phi::PhiFunction& f,
                                const std::vector<double>& psi_raw, NormalizeMode mode) {
  phi::PhiCalculus calc(f);
  ReferenceSystem ref{space, calc, {}, {}, 0.0, 1.0, {}, {}, {}, 0.0, {}};

  if (mode == NormalizeMode::shift) {
    ref.lambda = normalize_potential(space, calc, psi_raw);
    ref.psi.resize(psi_raw.size());
    for (size_t i = 0; i < psi_raw.size(); ++i) ref.psi[i] = psi_raw[i] - ref.lambda;
  } else {
    double total = 0.0;
    for (int i = 0; i < space.n(); ++i) total += calc.exp(-psi_raw[i]) * space.w()[i];
    if (!std::isfinite(total) || !(total > 0.0))
      throw std::invalid_argument("weight rescaling needs a finite positive raw mass");
    ref.weight_rescale = 1.0 / total;
    ref.space = space.with_f_shift(std::log(total));
    ref.psi = psi_raw;
  }

  const int n = ref.space.n();
  ref.sigma.resize(n);
  ref.support.resize(n);
  for (int i = 0; i < n; ++i) {
    ref.sigma[i] = calc.exp(-ref.psi[i]);
    if (std::isinf(ref.sigma[i]))
      throw std::invalid_argument("potential violates the upper range bound");
    ref.support[i] = ref.sigma[i] > 0.0 ? 1 : 0;
  }
  ref.grad_psi = gradient(ref.space, ref.psi);
  ref.nu.rho = ref.sigma;

  AdmissibilityReport& rep = ref.report;
  const auto oi = calc.order_indices();
  rep.theta = oi.theta;
  rep.delta = oi.delta;
  rep.N = oi.N;
  rep.coefficient_unit_at_one = std::abs(f(1.0) - 1.0) <= 1e-9;
  rep.order_index_window = oi.theta >= 0.0 && oi.theta < 1.5;
  const double L_matching = phi::powerform::L_m(2.0 - oi.theta);
  rep.potential_above_matching_bound = true;
  rep.potential_above_range_bound = true;
  rep.window_nonempty = false;
  for (int i = 0; i < n; ++i) {
    if (!(ref.psi[i] > -L_matching)) rep.potential_above_matching_bound = false;
    if (!(-ref.psi[i] < calc.L())) rep.potential_above_range_bound = false;
    if (ref.support[i]) rep.window_nonempty = true;
  }
  double habs = 0.0, slnabs = 0.0;
  for (int i = 0; i < n; ++i) {
    if (ref.sigma[i] > 0.0) {
      habs += std::abs(calc.h(ref.sigma[i])) * ref.space.w()[i];
      slnabs += std::abs(ref.sigma[i] * calc.ln(ref.sigma[i])) * ref.space.w()[i];
    }
  }
  rep.integrable = std::isfinite(habs) && std::isfinite(slnabs);
  rep.admissible = rep.coefficient_unit_at_one && rep.order_index_window &&
                   rep.potential_above_matching_bound && rep.potential_above_range_bound &&
                   rep.window_nonempty && rep.integrable;
  const auto hess = second_difference(ref.space, ref.psi);
  rep.min_hess_psi = *std::min_element(hess.begin(), hess.end());
  const auto ric = ricci_N(ref.space, oi.N);
  rep.min_ricci = *std::min_element(ric.begin(), ric.end());

  ref.H_nu = entropy_H(ref, ref.nu);
  return ref;
}

double entropy_H(const ReferenceSystem& ref, const Density& mu) {
  const int n = ref.space.n();
  if (static_cast<int>(mu.rho.size()) != n)
    throw std::invalid_argument("density size mismatch");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double rho = mu.rho[i];
    if (rho == 0.0) continue;
    const double hp = ref.h_prime_at(i);
    if (std::isinf(hp)) return phi::kInf;  // mass off the admissible region
    total += (ref.calc.h(rho) - hp * rho) * ref.space.w()[i];
    if (std::isinf(total)) return phi::kInf;
  }
  return total;
}

double bregman(const ReferenceSystem& ref, const Density& mu, const Density& base) {
  const int n = ref.space.n();
  if (static_cast<int>(mu.rho.size()) != n || static_cast<int>(base.rho.size()) != n)
    throw std::invalid_argument("density size mismatch");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = mu.rho[i], s = base.rho[i];
    if (r == s) continue;
    if (s == 0.0) {
      if (std::isinf(ref.calc.l())) return phi::kInf;
      total += (ref.calc.u(r) - ref.calc.l() * r) * ref.space.w()[i];
    } else {
      total += (ref.calc.u(r) - ref.calc.u(s) - ref.calc.ln(s) * (r - s)) * ref.space.w()[i];
    }
    if (std::isinf(total)) return phi::kInf;
  }
  return total;
}

namespace {

/// Squared integral of the gradient of g against mu, where g is defined only
/// on cells flagged usable; differences stay inside the usable set.
double gradient_energy(const ReferenceSystem& ref, const Density& mu,
                       const std::vector<double>& g, const std::vector<char>& usable) {
  const int n = ref.space.n();
  const double h = ref.space.h();
  const bool circ = ref.space.topology() == Topology::circle;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!usable[i] || mu.rho[i] == 0.0) continue;
    const int ip = circ ? (i + 1) % n : i + 1;
    const int im = circ ? (i + n - 1) % n : i - 1;
    const bool has_p = ip < n && usable[ip];
    const bool has_m = im >= 0 && usable[im];
    double d;
    if (has_p && has_m)
      d = (g[ip] - g[im]) / (2.0 * h);
    else if (has_p)
      d = (g[ip] - g[i]) / h;
    else if (has_m)
      d = (g[i] - g[im]) / h;
    else
      d = 0.0;
    total += d * d * mu.rho[i] * ref.space.w()[i];
  }
  return total;
}

}  // namespace

double fisher_I(const ReferenceSystem& ref, const Density& mu) {
  const int n = ref.space.n();
  std::vector<double> g(n, 0.0);
  std::vector<char> usable(n, 0);
  for (int i = 0; i < n; ++i) {
    if (mu.rho[i] > 0.0 && !ref.support[i]) return phi::kInf;
    if (mu.rho[i] > 0.0 && ref.support[i]) {
      g[i] = ref.calc.ln(mu.rho[i]) - ref.calc.ln(ref.sigma[i]);
      usable[i] = 1;
    }
  }
  return gradient_energy(ref, mu, g, usable);
}

double fisher_I_flux(const ReferenceSystem& ref, const Density& mu) {
  const int n = ref.space.n();
  std::vector<double> vgrid(n);
  for (int i = 0; i < n; ++i) vgrid[i] = ref.calc.v(mu.rho[i]);
  const auto dv = gradient(ref.space, vgrid);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (mu.rho[i] == 0.0) continue;
    const double field = dv[i] / mu.rho[i] + ref.grad_psi[i];
    total += field * field * mu.rho[i] * ref.space.w()[i];
  }
  return total;
}

std::vector<double> ricci_N(const WeightedSpace& space, double N) {
  const auto fpp = second_difference(space, space.f());
  const auto fp = gradient(space, space.f());
  std::vector<double> out(space.n());
  for (int i = 0; i < space.n(); ++i) {
    if (std::isinf(N)) {
      out[i] = fpp[i];
    } else if (N == 1.0) {
      out[i] = std::abs(fp[i]) > 1e-12 ? -phi::kInf : fpp[i];
    } else {
      out[i] = fpp[i] - fp[i] * fp[i] / (N - 1.0);
    }
  }
  return out;
}

}  // namespace phiflow::grid
