#include "phiflow/expfamily.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace phiflow::expfamily {

namespace {

std::vector<double> clamp_box(std::vector<double> xi, const std::vector<double>& lo,
                              const std::vector<double>& hi) {
  for (size_t j = 0; j < xi.size(); ++j) xi[j] = std::clamp(xi[j], lo[j], hi[j]);
  return xi;
}

}  // namespace

Family make_family(const grid::WeightedSpace& space, const phi::PhiFunction& coefficient,
                   const std::vector<std::function<double(double)>>& statistics) {
  Family family{space, coefficient, {}};
  family.stats.reserve(statistics.size());
  for (const auto& X : statistics) family.stats.push_back(space.sample(X));
  return family;
}

Member member_at(const Family& family, const std::vector<double>& xi) {
  if (xi.size() != family.stats.size())
    throw std::invalid_argument("member_at: parameter dimension mismatch");
  const int n = family.space.n();
  std::vector<double> psi_raw(n, 0.0);
  for (size_t j = 0; j < xi.size(); ++j)
    for (int i = 0; i < n; ++i) psi_raw[i] += xi[j] * family.stats[j][i];
  Member member{xi, grid::build_reference(family.space, family.coefficient, psi_raw), {}};
  member.eta = moments(family, member.ref.nu);
  return member;
}

std::vector<double> moments(const Family& family, const grid::Density& mu) {
  const int n = family.space.n();
  std::vector<double> eta(family.stats.size(), 0.0);
  for (size_t j = 0; j < family.stats.size(); ++j)
    for (int i = 0; i < n; ++i) eta[j] += family.stats[j][i] * mu.rho[i] * family.space.w()[i];
  return eta;
}

double divergence(const Family&, const grid::Density& mu, const Member& member) {
  return grid::bregman(member.ref, mu, member.ref.nu);
}

ProjectionReport bregman_project(const Family& family, const grid::Density& mu,
                                 const std::vector<double>& lo, const std::vector<double>& hi) {
  const size_t dim = family.stats.size();
  if (lo.size() != dim || hi.size() != dim)
    throw std::invalid_argument("bregman_project: box dimension mismatch");
  std::vector<double> eta_mu = moments(family, mu);

  // Restarts: box center plus corners (all corners up to dimension 2, the
  // extreme diagonal pair beyond).
  std::vector<std::vector<double>> starts;
  std::vector<double> center(dim);
  for (size_t j = 0; j < dim; ++j) center[j] = 0.5 * (lo[j] + hi[j]);
  starts.push_back(center);
  if (dim <= 2) {
    int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
      std::vector<double> xi(dim);
      for (size_t j = 0; j < dim; ++j) xi[j] = (c >> j) & 1 ? hi[j] : lo[j];
      starts.push_back(xi);
    }
  } else {
    starts.push_back(lo);
    starts.push_back(hi);
  }

  std::optional<Member> best_member;
  double best_F = phi::kInf, best_residual = phi::kInf;
  int best_iterations = 0;
  for (const auto& start : starts) {
    std::vector<double> xi = clamp_box(start, lo, hi);
    Member member = member_at(family, xi);
    double F = divergence(family, mu, member);
    double step = 1.0;
    int iterations = 0;
    std::vector<double> grad(dim), grad_prev(dim), xi_prev(dim);
    bool have_prev = false;
    for (int iter = 0; iter < 400; ++iter) {
      iterations = iter;
      for (size_t j = 0; j < dim; ++j) grad[j] = eta_mu[j] - member.eta[j];
      double gmax = 0.0;
      for (size_t j = 0; j < dim; ++j) {
        bool at_lo = xi[j] <= lo[j] && grad[j] > 0.0;
        bool at_hi = xi[j] >= hi[j] && grad[j] < 0.0;
        if (!at_lo && !at_hi) gmax = std::max(gmax, std::abs(grad[j]));
      }
      if (gmax <= 1e-12 && std::isfinite(F)) break;

      if (have_prev) {
        double ss = 0.0, sy = 0.0;
        for (size_t j = 0; j < dim; ++j) {
          double s_j = xi[j] - xi_prev[j];
          ss += s_j * s_j;
          sy += s_j * (grad[j] - grad_prev[j]);
        }
        if (sy > 1e-30 && ss > 1e-30) step = std::clamp(ss / sy, 1e-10, 1e8);
      }
      xi_prev = xi;
      grad_prev = grad;

      bool accepted = false;
      const double noise = 1e-14 * (1.0 + std::abs(std::isfinite(F) ? F : 0.0));
      for (int bt = 0; bt < 60; ++bt) {
        std::vector<double> trial(dim);
        for (size_t j = 0; j < dim; ++j) trial[j] = xi[j] - step * grad[j];
        trial = clamp_box(std::move(trial), lo, hi);
        Member cand = member_at(family, trial);
        double Ft = divergence(family, mu, cand);
        double decrease = 0.0;
        for (size_t j = 0; j < dim; ++j) decrease += grad[j] * (xi[j] - trial[j]);
        if (std::isfinite(Ft) && (!std::isfinite(F) || Ft <= F - 1e-4 * decrease + noise)) {
          xi = std::move(trial);
          member = std::move(cand);
          F = Ft;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      have_prev = true;
    }
    double residual = 0.0;
    for (size_t j = 0; j < dim; ++j) residual = std::max(residual, std::abs(eta_mu[j] - member.eta[j]));
    if (!best_member || F < best_F || (F == best_F && residual < best_residual)) {
      best_member = std::move(member);
      best_F = F;
      best_residual = residual;
      best_iterations = iterations;
    }
  }
  ProjectionReport report{std::move(*best_member), best_F, best_residual, best_iterations,
                          std::isfinite(best_F) && best_residual <= 1e-8};
  return report;
}

double pythagoras_residual(const Family& family, const grid::Density& mu,
                           const Member& projection, const Member& outer) {
  double total = divergence(family, mu, outer);
  double near = divergence(family, mu, projection);
  double leg = divergence(family, projection.ref.nu, outer);
  return total - near - leg;
}

}  // namespace phiflow::expfamily
