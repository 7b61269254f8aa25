#include "phiflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "phiflow/transport.hpp"

namespace phiflow::flow {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Everything one descent step needs: the calculus, the normalized potential
/// shift, and the panel count.
struct JkoContext {
  const Problem* problem;
  phi::PhiCalculus calc;
  double lambda;
  int panels;
  double du;       // mass per panel
  double lo, hi;   // box for the knots
};

/// -clamp(lambda - psi(x), l, L): the potential part of the entropy density
/// in mass coordinates, with the range constant already cancelled.
double kappa(const JkoContext& ctx, double x) {
  double t = ctx.lambda - ctx.problem->psi(x);
  double l = ctx.calc.l(), L = ctx.calc.L();
  if (t < l) t = l;
  if (t > L) t = L;
  return -t;
}

double kappa_grad(const JkoContext& ctx, double x) {
  double t = ctx.lambda - ctx.problem->psi(x);
  if (t <= ctx.calc.l() || t >= ctx.calc.L()) return 0.0;
  return ctx.problem->dpsi(x);
}

double entropy_of_knots(const JkoContext& ctx, const std::vector<double>& q) {
  const int P = ctx.panels;
  const double gap_floor = 1e-14 * (ctx.hi - ctx.lo);
  double total = 0.0;
  for (int k = 0; k < P; ++k) {
    double dq = std::max(q[k + 1] - q[k], gap_floor);
    double mid = 0.5 * (q[k] + q[k + 1]);
    double rho = ctx.du * std::exp(ctx.problem->f(mid)) / dq;
    total += ctx.du * (ctx.calc.u(rho) / rho + kappa(ctx, mid));
  }
  return total;
}

/// Bilinear move cost between two piecewise-linear quantile functions sharing
/// the uniform levels: exact integral of the squared knot difference.
double move_cost_sq(const JkoContext& ctx, const std::vector<double>& q,
                    const std::vector<double>& prev) {
  double total = 0.0;
  for (int k = 0; k < ctx.panels; ++k) {
    double d0 = q[k] - prev[k];
    double d1 = q[k + 1] - prev[k + 1];
    total += (ctx.du / 3.0) * (d0 * d0 + d0 * d1 + d1 * d1);
  }
  return total;
}

double objective(const JkoContext& ctx, const std::vector<double>& q,
                 const std::vector<double>& prev, double delta) {
  return entropy_of_knots(ctx, q) + move_cost_sq(ctx, q, prev) / (2.0 * delta);
}

std::vector<double> objective_gradient(const JkoContext& ctx, const std::vector<double>& q,
                                       const std::vector<double>& prev, double delta) {
  const int P = ctx.panels;
  const double gap_floor = 1e-14 * (ctx.hi - ctx.lo);
  std::vector<double> g(P + 1, 0.0);
  for (int k = 0; k < P; ++k) {
    double dq = std::max(q[k + 1] - q[k], gap_floor);
    double mid = 0.5 * (q[k] + q[k + 1]);
    double rho = ctx.du * std::exp(ctx.problem->f(mid)) / dq;
    double dudr = ctx.calc.v(rho) / (rho * rho);  // derivative of u(r)/r
    double fprime = ctx.problem->df(mid);
    double kprime = kappa_grad(ctx, mid);
    g[k] += ctx.du * (dudr * rho * (1.0 / dq + 0.5 * fprime) + 0.5 * kprime);
    g[k + 1] += ctx.du * (dudr * rho * (-1.0 / dq + 0.5 * fprime) + 0.5 * kprime);
  }
  double scale = ctx.du / (3.0 * 2.0 * delta);
  for (int j = 0; j <= P; ++j) {
    double dj = q[j] - prev[j];
    double acc = 0.0;
    if (j > 0) acc += (q[j - 1] - prev[j - 1]) + 2.0 * dj;
    if (j < P) acc += 2.0 * dj + (q[j + 1] - prev[j + 1]);
    g[j] += scale * acc;
  }
  return g;
}

/// Pool-adjacent-violators projection onto nondecreasing sequences (uniform
/// weights), followed by clipping to the box; the composition stays the
/// Euclidean projection onto the intersection.
void project_monotone_box(std::vector<double>& q, double lo, double hi) {
  const int n = static_cast<int>(q.size());
  std::vector<double> value(n);
  std::vector<int> count(n);
  int top = 0;
  for (int i = 0; i < n; ++i) {
    value[top] = q[i];
    count[top] = 1;
    while (top > 0 && value[top - 1] >= value[top]) {
      double merged = (value[top - 1] * count[top - 1] + value[top] * count[top]) /
                      (count[top - 1] + count[top]);
      count[top - 1] += count[top];
      value[top - 1] = merged;
      --top;
    }
    ++top;
  }
  int i = 0;
  for (int b = 0; b < top; ++b)
    for (int r = 0; r < count[b]; ++r) q[i++] = std::clamp(value[b], lo, hi);
}

struct SolveOutcome {
  double objective_value = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

SolveOutcome minimize_step(const JkoContext& ctx, std::vector<double>& q,
                           const std::vector<double>& prev, double delta) {
  const int n = static_cast<int>(q.size());
  project_monotone_box(q, ctx.lo, ctx.hi);
  double J = objective(ctx, q, prev, delta);
  std::vector<double> g = objective_gradient(ctx, q, prev, delta);
  double step = delta * ctx.panels;
  SolveOutcome out;
  const int max_iter = 20000;
  double best_res = phi::kInf;
  int best_iter = 0;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> unit(n);
    for (int j = 0; j < n; ++j) unit[j] = q[j] - g[j];
    project_monotone_box(unit, ctx.lo, ctx.hi);
    double res = 0.0;
    for (int j = 0; j < n; ++j) res = std::max(res, std::abs(q[j] - unit[j]));
    out.residual = res;
    out.iterations = iter;
    if (res <= 1e-7) break;
    if (res < 0.9 * best_res) {
      best_res = res;
      best_iter = iter;
    } else if (iter - best_iter > 2000) {
      break;  // stalled below the resolution of the objective
    }

    std::vector<double> trial(n);
    double Jt = 0.0, decrease = 0.0;
    bool accepted = false;
    // Sufficient decrease up to round-off: near the optimum the true decrease
    // drops below the resolution of the objective, but the analytic gradient
    // still points downhill, so steps within noise are allowed through.
    const double noise = 1e-14 * (1.0 + std::abs(J));
    for (int bt = 0; bt < 60; ++bt) {
      for (int j = 0; j < n; ++j) trial[j] = q[j] - step * g[j];
      project_monotone_box(trial, ctx.lo, ctx.hi);
      decrease = 0.0;
      for (int j = 0; j < n; ++j) decrease += g[j] * (q[j] - trial[j]);
      Jt = objective(ctx, trial, prev, delta);
      if (Jt <= J - 1e-4 * decrease + noise) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    std::vector<double> g_new = objective_gradient(ctx, trial, prev, delta);
    double sy = 0.0, ss = 0.0;
    for (int j = 0; j < n; ++j) {
      double s_j = trial[j] - q[j];
      ss += s_j * s_j;
      sy += s_j * (g_new[j] - g[j]);
    }
    q.swap(trial);
    g.swap(g_new);
    J = Jt;
    if (ss < 1e-30) break;
    step = (sy > 1e-30) ? std::clamp(ss / sy, 1e-12, 1e8) : step * 2.0;
  }
  out.objective_value = J;
  return out;
}

/// Piecewise-linear inverse of the piecewise-linear CDF built from cell
/// masses (mass spread uniformly inside each cell).
std::vector<double> knots_from_density(const grid::WeightedSpace& space, const grid::Density& d,
                                       int panels) {
  const int n = space.n();
  std::vector<double> mass = grid::cell_masses(space, d);
  std::vector<double> cum(n + 1, 0.0);
  for (int i = 0; i < n; ++i) cum[i + 1] = cum[i] + mass[i];
  double total = cum[n];
  if (total <= 0.0) throw std::invalid_argument("knots_from_density: empty density");
  for (double& c : cum) c /= total;
  cum[n] = 1.0;
  int first_mass = 0;
  while (first_mass < n - 1 && mass[first_mass] <= 0.0) ++first_mass;
  std::vector<double> q(panels + 1);
  int cell = 0;
  for (int j = 0; j <= panels; ++j) {
    double level = static_cast<double>(j) / panels;
    if (j == 0) {
      q[0] = space.a() + first_mass * space.h();  // left edge of the support
      continue;
    }
    // Tolerant advance so flat (zero-mass) stretches of the CDF are skipped
    // and trailing round-off in the cumulative sums cannot drag a knot into
    // the vacuum past the support.
    while (cell < n - 1 && cum[cell + 1] < level - 1e-14) ++cell;
    double span = cum[cell + 1] - cum[cell];
    double frac = span > 1e-300 ? std::clamp((level - cum[cell]) / span, 0.0, 1.0) : 0.0;
    q[j] = space.a() + (cell + frac) * space.h();
  }
  return q;
}

grid::Density knots_to_density(const grid::WeightedSpace& space, const std::vector<double>& q) {
  const int n = space.n();
  const int P = static_cast<int>(q.size()) - 1;
  const double du = 1.0 / P;
  std::vector<double> mass(n, 0.0);
  auto cell_of = [&](double x) {
    int i = static_cast<int>(std::floor((x - space.a()) / space.h()));
    return std::clamp(i, 0, n - 1);
  };
  for (int k = 0; k < P; ++k) {
    double l = q[k], r = q[k + 1];
    if (r - l < 1e-300) {
      mass[cell_of(l)] += du;
      continue;
    }
    int i0 = cell_of(l), i1 = cell_of(r);
    for (int i = i0; i <= i1; ++i) {
      double cl = space.a() + i * space.h();
      double cr = cl + space.h();
      double overlap = std::min(r, cr) - std::max(l, cl);
      if (overlap > 0.0) mass[i] += du * overlap / (r - l);
    }
  }
  grid::Density out;
  out.rho.resize(n);
  for (int i = 0; i < n; ++i) out.rho[i] = mass[i] / space.w()[i];
  return out;
}

JkoContext make_context(const Problem& problem, int panels) {
  phi::PhiCalculus calc(problem.coefficient);
  double lambda = grid::normalize_potential(problem.space, calc,
                                            problem.space.sample(problem.psi));
  JkoContext ctx{&problem, calc, lambda, panels, 1.0 / panels, problem.space.a(),
                 problem.space.b()};
  return ctx;
}

double panel_density(const JkoContext& ctx, const std::vector<double>& q, int k) {
  double dq = std::max(q[k + 1] - q[k], 1e-14 * (ctx.hi - ctx.lo));
  double mid = 0.5 * (q[k] + q[k + 1]);
  return ctx.du * std::exp(ctx.problem->f(mid)) / dq;
}

/// Transport flux integral of the weak form at one state: the integrand
/// (grad rho / phi(rho) + grad psi) . grad w against mu, in mass coordinates.
double flux_integral(const JkoContext& ctx, const std::vector<double>& q,
                     const std::function<double(double)>& dw) {
  const int P = ctx.panels;
  std::vector<double> rho(P), mid(P);
  for (int k = 0; k < P; ++k) {
    rho[k] = panel_density(ctx, q, k);
    mid[k] = 0.5 * (q[k] + q[k + 1]);
  }
  double total = 0.0;
  for (int k = 0; k < P; ++k) {
    int kl = std::max(0, k - 1), kr = std::min(P - 1, k + 1);
    double drho = (mid[kr] > mid[kl]) ? (rho[kr] - rho[kl]) / (mid[kr] - mid[kl]) : 0.0;
    double field = drho / ctx.problem->coefficient(rho[k]) + ctx.problem->dpsi(mid[k]);
    total += ctx.du * field * dw(mid[k]);
  }
  return total;
}

/// Minimal cloud-in-cell deposit used by the slope probes.
grid::Density deposit_shifted(const grid::WeightedSpace& space, const grid::Density& mu,
                              const std::vector<double>& velocity, double eps) {
  const int n = space.n();
  std::vector<double> mass = grid::cell_masses(space, mu);
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (mass[i] <= 0.0) continue;
    double y = space.x()[i] + eps * velocity[i];
    double s = (y - space.a()) / space.h() - 0.5;
    if (space.topology() == grid::Topology::circle) {
      s = s - std::floor(s / n) * n;
      int j0 = static_cast<int>(std::floor(s));
      double frac = s - j0;
      out[((j0 % n) + n) % n] += mass[i] * (1.0 - frac);
      out[(((j0 + 1) % n) + n) % n] += mass[i] * frac;
    } else {
      s = std::clamp(s, 0.0, static_cast<double>(n - 1));
      int j0 = std::min(n - 2, static_cast<int>(std::floor(s)));
      if (n == 1) j0 = 0;
      double frac = std::clamp(s - j0, 0.0, 1.0);
      out[j0] += mass[i] * (1.0 - frac);
      if (j0 + 1 < n) out[j0 + 1] += mass[i] * frac;
    }
  }
  grid::Density d;
  d.rho.resize(n);
  for (int i = 0; i < n; ++i) d.rho[i] = out[i] / space.w()[i];
  return d;
}

}  // namespace

FlowResult run_jko(const Problem& problem, const grid::Density& init, double T, double delta,
                   int panels, bool check_perturbations) {
  if (panels < 2) throw std::invalid_argument("run_jko: need at least 2 panels");
  JkoContext ctx = make_context(problem, panels);
  std::vector<double> q = knots_from_density(problem.space, init, panels);
  project_monotone_box(q, ctx.lo, ctx.hi);

  FlowResult result;
  result.lambda = ctx.lambda;
  result.times.push_back(0.0);
  result.states.push_back(knots_to_density(problem.space, q));
  result.quantiles.push_back(q);

  int steps = std::max(1, static_cast<int>(std::llround(T / delta)));
  std::mt19937_64 rng(20240901ull);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int s = 0; s < steps; ++s) {
    std::vector<double> prev = q;
    double H_before = entropy_of_knots(ctx, prev);
    SolveOutcome outcome = minimize_step(ctx, q, prev, delta);

    StepReport report;
    report.entropy_before = H_before;
    report.entropy_after = entropy_of_knots(ctx, q);
    report.w2_sq = move_cost_sq(ctx, q, prev);
    report.objective_drop = H_before - outcome.objective_value;
    report.kkt_residual = outcome.residual;
    report.iterations = outcome.iterations;
    if (check_perturbations) {
      double J_opt = outcome.objective_value;
      double tol = 1e-9 * (1.0 + std::abs(J_opt));
      for (int trial = 0; trial < 50 && report.perturbations_ok; ++trial) {
        std::vector<double> probe = q;
        for (double& v : probe) v += 1e-3 * unif(rng);
        project_monotone_box(probe, ctx.lo, ctx.hi);
        if (objective(ctx, probe, prev, delta) < J_opt - tol) report.perturbations_ok = false;
      }
    }
    result.steps.push_back(report);
    result.times.push_back((s + 1) * delta);
    result.states.push_back(knots_to_density(problem.space, q));
    result.quantiles.push_back(q);
  }
  return result;
}

double quantile_entropy(const Problem& problem, const std::vector<double>& quantiles,
                        double lambda) {
  JkoContext ctx = make_context(problem, static_cast<int>(quantiles.size()) - 1);
  ctx.lambda = lambda;
  return entropy_of_knots(ctx, quantiles);
}

grid::Density pde_oracle_solve(const Problem& problem, const grid::Density& init, double T) {
  const grid::WeightedSpace& space = problem.space;
  const int n = space.n();
  const double h = space.h();
  const bool circle = space.topology() == grid::Topology::circle;
  phi::PhiCalculus calc(problem.coefficient);
  std::vector<double> psi = space.sample(problem.psi);
  std::vector<double> mass = grid::cell_masses(space, init);
  std::vector<double> rho(n), vcol(n);

  const double floor_rho = 1e-8;
  double max_dpsi = 0.0;
  for (int i = 0; i + 1 < n; ++i) max_dpsi = std::max(max_dpsi, std::abs(psi[i + 1] - psi[i]) / h);
  if (circle && n > 1) max_dpsi = std::max(max_dpsi, std::abs(psi[0] - psi[n - 1]) / h);

  double t = 0.0;
  while (t < T) {
    for (int i = 0; i < n; ++i) rho[i] = mass[i] / space.w()[i];
    double max_diff = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = std::max(rho[i], floor_rho);
      vcol[i] = calc.v(r);
      max_diff = std::max(max_diff, r / problem.coefficient(r));
    }
    double dt = 0.4 * h * h / std::max(max_diff, 1e-300);
    if (max_dpsi > 0.0) dt = std::min(dt, 0.5 * h / max_dpsi);
    dt = std::min(dt, T - t);

    auto face_gain = [&](int left, int right, double f_face) {
      double dpsi_face = (psi[right] - psi[left]) / h;
      double up = dpsi_face > 0.0 ? rho[right] : rho[left];
      return std::exp(-f_face) * ((vcol[right] - vcol[left]) / h + up * dpsi_face);
    };
    std::vector<double> gain(n + 1, 0.0);  // gain[i]: divergence integrand at the left face of cell i
    for (int i = 1; i < n; ++i) gain[i] = face_gain(i - 1, i, space.f_face()[i]);
    if (circle && n > 1) {
      double seam = face_gain(n - 1, 0, space.f_face()[0]);
      gain[0] = seam;
      gain[n] = seam;
    }
    // gain[i] holds e^{-f}(dv/dx + rho dpsi/dx) at the left face of cell i;
    // the divergence-form update is the face difference.
    for (int i = 0; i < n; ++i) mass[i] += dt * (gain[i + 1] - gain[i]);
    t += dt;
  }
  grid::Density out;
  out.rho.resize(n);
  for (int i = 0; i < n; ++i) out.rho[i] = mass[i] / space.w()[i];
  return out;
}

grid::Density spectral_heat_solve(const grid::WeightedSpace& space, const grid::Density& init,
                                  double T) {
  if (space.topology() != grid::Topology::circle)
    throw std::invalid_argument("spectral_heat_solve: circle only");
  const int n = space.n();
  for (int i = 1; i < n; ++i)
    if (std::abs(space.f()[i] - space.f()[0]) > 1e-12)
      throw std::invalid_argument("spectral_heat_solve: uniform weight only");
  const double len = space.length();
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      double ang = 2.0 * kPi * k * j / n;
      a[k] += init.rho[j] * std::cos(ang) / n;
      b[k] += init.rho[j] * std::sin(ang) / n;
    }
  }
  grid::Density out;
  out.rho.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    int signed_k = (k <= n / 2) ? k : k - n;
    double omega = 2.0 * kPi * signed_k / len;
    double decay = std::exp(-omega * omega * T);
    for (int j = 0; j < n; ++j) {
      double ang = 2.0 * kPi * k * j / n;
      out.rho[j] += decay * (a[k] * std::cos(ang) + b[k] * std::sin(ang));
    }
  }
  return out;
}

double l1_distance(const grid::WeightedSpace& space, const grid::Density& d0,
                   const grid::Density& d1) {
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) total += std::abs(d0.rho[i] - d1.rho[i]) * space.w()[i];
  return total;
}

double weak_form_residual(const Problem& problem, const FlowResult& result,
                          const std::function<double(double)>& w,
                          const std::function<double(double)>& dw) {
  if (result.quantiles.size() < 2)
    throw std::invalid_argument("weak_form_residual: need at least two checkpoints");
  JkoContext ctx = make_context(problem, static_cast<int>(result.quantiles.front().size()) - 1);
  auto observable = [&](const std::vector<double>& q) {
    double total = 0.0;
    for (int k = 0; k < ctx.panels; ++k) total += ctx.du * w(0.5 * (q[k] + q[k + 1]));
    return total;
  };
  double lhs = observable(result.quantiles.back()) - observable(result.quantiles.front());
  double integral = 0.0;
  std::vector<double> flux(result.quantiles.size());
  for (size_t i = 0; i < result.quantiles.size(); ++i)
    flux[i] = flux_integral(ctx, result.quantiles[i], dw);
  for (size_t i = 0; i + 1 < result.quantiles.size(); ++i) {
    double dt = result.times[i + 1] - result.times[i];
    integral += 0.5 * (flux[i] + flux[i + 1]) * dt;
  }
  return std::abs(lhs + integral);
}

SlopeReport slope_vs_fisher(const grid::ReferenceSystem& ref, const grid::Density& mu) {
  const grid::WeightedSpace& space = ref.space;
  const int n = space.n();
  const double len = space.length();
  std::vector<std::vector<double>> bank;
  auto add = [&](const std::function<double(double)>& g) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = g((space.x()[i] - space.a()) / len);
    bank.push_back(std::move(v));
  };
  add([](double) { return 1.0; });
  add([](double t) { return t; });
  add([](double t) { return t * t; });
  add([](double t) { return t * t * t; });
  add([](double t) { return t * t * t * t; });
  add([](double t) { return std::sin(2.0 * kPi * t); });
  add([](double t) { return std::cos(2.0 * kPi * t); });
  add([](double t) { return std::sin(4.0 * kPi * t); });
  add([](double t) { return std::cos(4.0 * kPi * t); });
  add([](double t) { return std::sin(6.0 * kPi * t); });
  add([](double t) { return std::cos(6.0 * kPi * t); });
  add([](double t) { return std::exp(t); });
  add([](double t) { return std::exp(-4.0 * (t - 0.5) * (t - 0.5)); });
  add([](double t) { return std::tanh(4.0 * t - 2.0); });
  add([](double t) { return 1.0 / (1.0 + t * t); });

  // Analytic steepest direction: minus the gradient of the driving quantity.
  std::vector<double> drive(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (ref.support[i] && mu.rho[i] > 0.0)
      drive[i] = ref.calc.ln(mu.rho[i]) - ref.calc.ln(ref.sigma[i]);
  std::vector<double> steepest = grid::gradient(space, drive);
  for (double& v : steepest) v = -v;
  bank.push_back(steepest);

  double H0 = grid::entropy_H(ref, deposit_shifted(space, mu, bank[0], 0.0));
  SlopeReport report;
  report.fisher_sqrt = std::sqrt(std::max(0.0, grid::fisher_I(ref, mu)));
  for (size_t p = 0; p < bank.size(); ++p) {
    double norm_sq = 0.0;
    for (int i = 0; i < n; ++i)
      norm_sq += bank[p][i] * bank[p][i] * mu.rho[i] * space.w()[i];
    if (norm_sq < 1e-16) continue;
    auto rate = [&](double eps) {
      return (grid::entropy_H(ref, deposit_shifted(space, mu, bank[p], eps)) - H0) / eps;
    };
    double r1 = rate(1e-3), r2 = rate(1e-4);
    double derivative = r2 - (r1 - r2) / 9.0;
    double ratio = std::max(0.0, -derivative) / std::sqrt(norm_sq);
    if (ratio > report.best_ratio) {
      report.best_ratio = ratio;
      report.best_probe = static_cast<int>(p);
    }
  }
  return report;
}

ContractionReport contraction_report(const Problem& problem, const grid::Density& mu0,
                                     const grid::Density& nu0, double K, double T, double delta,
                                     int panels) {
  FlowResult mu_flow = run_jko(problem, mu0, T, delta, panels);
  FlowResult nu_flow = run_jko(problem, nu0, T, delta, panels);
  ContractionReport report;
  double w0 = transport::w2(problem.space, mu_flow.states[0], nu_flow.states[0]);
  for (size_t i = 1; i < mu_flow.times.size(); ++i) {
    double t = mu_flow.times[i];
    double wt = transport::w2(problem.space, mu_flow.states[i], nu_flow.states[i]);
    report.times.push_back(t);
    report.ratios.push_back(wt / (std::exp(-K * t) * w0));
  }
  report.worst = 0.0;
  for (double r : report.ratios) report.worst = std::max(report.worst, r);
  return report;
}

}  // namespace phiflow::flow
