#include "phiflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace phiflow::transport {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double cost_pow(double d, int p) { return p == 1 ? std::fabs(d) : d * d; }

AtomCloud normalized(AtomCloud c) {
  double total = std::accumulate(c.mass.begin(), c.mass.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("transport: measure has no mass");
  for (double& m : c.mass) m /= total;
  return c;
}

/// A right-continuous step function on (0,1]: value val[k] on (hi[k-1], hi[k]].
struct StepFn {
  std::vector<double> hi;
  std::vector<double> val;
};

StepFn quantile_steps(const AtomCloud& c) {
  StepFn q;
  q.hi.resize(c.mass.size());
  std::partial_sum(c.mass.begin(), c.mass.end(), q.hi.begin());
  q.val = c.pos;
  return q;
}

/// Quantile of a circle measure lifted to the universal cover, with its mass
/// levels shifted by theta: u maps to Q(u - theta) + len * winding.
StepFn shifted_quantile(const AtomCloud& c, double theta, double len) {
  std::vector<double> cum(c.mass.size());
  std::partial_sum(c.mass.begin(), c.mass.end(), cum.begin());
  StepFn q;
  for (int k = -2; k <= 2; ++k) {
    for (std::size_t j = 0; j < cum.size(); ++j) {
      double lo = theta + (j == 0 ? 0.0 : cum[j - 1]) + k;
      double hi = theta + cum[j] + k;
      if (hi <= 0.0 || lo >= 1.0) continue;
      q.hi.push_back(std::min(hi, 1.0));
      q.val.push_back(c.pos[j] + k * len);
    }
  }
  return q;
}

double step_cost(const StepFn& q0, const StepFn& q1, int p) {
  std::size_t i = 0, j = 0;
  double u = 0.0, total = 0.0;
  while (i < q0.hi.size() && j < q1.hi.size()) {
    double next = std::min(q0.hi[i], q1.hi[j]);
    total += (next - u) * cost_pow(q0.val[i] - q1.val[j], p);
    u = next;
    if (q0.hi[i] <= next) ++i;
    if (j < q1.hi.size() && q1.hi[j] <= next) ++j;
  }
  return total;
}

struct CircleCost {
  double cost;
  double theta;
};

/// Transport cost on the circle: monotone coupling on the universal cover
/// with the mass levels of one measure rotated by theta, minimized over
/// theta.  The cost is convex in theta, so a coarse scan locates the basin
/// and golden-section refines the shift to 1e-6.
CircleCost circle_cost(const grid::WeightedSpace& space, const AtomCloud& c0, const AtomCloud& c1,
                       int p) {
  double len = space.length();
  StepFn q0 = quantile_steps(c0);
  auto eval = [&](double theta) { return step_cost(q0, shifted_quantile(c1, theta, len), p); };

  int coarse = 128;
  double best_theta = 0.0, best = eval(0.0);
  for (int k = -coarse; k <= coarse; ++k) {
    double theta = static_cast<double>(k) / coarse;
    double c = eval(theta);
    if (c < best) {
      best = c;
      best_theta = theta;
    }
  }

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double step = 1.0 / coarse;
  double lo = best_theta - step, hi = best_theta + step;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = eval(x2);
    }
  }
  double mid = 0.5 * (lo + hi);
  double fm = eval(mid);
  if (fm < best) {
    best = fm;
    best_theta = mid;
  }
  return {best, best_theta};
}

double wp_cost(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1,
               int p) {
  AtomCloud c0 = normalized(atoms(space, d0));
  AtomCloud c1 = normalized(atoms(space, d1));
  if (space.topology() == grid::Topology::segment)
    return step_cost(quantile_steps(c0), quantile_steps(c1), p);
  return circle_cost(space, c0, c1, p).cost;
}

/// Linear deposition of one atom onto the two nearest cell centers.
void deposit(const grid::WeightedSpace& space, double y, double m, std::vector<double>& cell_mass) {
  int n = space.n();
  double s = (y - space.a()) / space.h() - 0.5;
  if (space.topology() == grid::Topology::segment) {
    if (s <= 0.0) {
      cell_mass[0] += m;
      return;
    }
    if (s >= n - 1.0) {
      cell_mass[n - 1] += m;
      return;
    }
    int k = static_cast<int>(std::floor(s));
    double frac = s - k;
    cell_mass[k] += m * (1.0 - frac);
    cell_mass[k + 1] += m * frac;
  } else {
    double sw = std::fmod(s, static_cast<double>(n));
    if (sw < 0.0) sw += n;
    int k = static_cast<int>(std::floor(sw)) % n;
    double frac = sw - std::floor(sw);
    cell_mass[k] += m * (1.0 - frac);
    cell_mass[(k + 1) % n] += m * frac;
  }
}

}  // namespace

AtomCloud atoms(const grid::WeightedSpace& space, const grid::Density& d) {
  if (static_cast<int>(d.rho.size()) != space.n())
    throw std::invalid_argument("transport: density size mismatch");
  AtomCloud c;
  for (int i = 0; i < space.n(); ++i) {
    double m = d.rho[i] * space.w()[i];
    if (m > 0.0) {
      c.pos.push_back(space.x()[i]);
      c.mass.push_back(m);
    }
  }
  if (c.pos.empty()) throw std::invalid_argument("transport: measure has no mass");
  return c;
}

double wp(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1,
          int p) {
  if (p != 1 && p != 2) throw std::invalid_argument("transport: only p = 1 and p = 2 supported");
  double c = wp_cost(space, d0, d1, p);
  return p == 1 ? c : std::sqrt(std::max(0.0, c));
}

double w1(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1) {
  return wp(space, d0, d1, 1);
}

double w2(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1) {
  return wp(space, d0, d1, 2);
}

double w2_lp_oracle(const grid::WeightedSpace& space, const grid::Density& d0,
                    const grid::Density& d1) {
  AtomCloud c0 = normalized(atoms(space, d0));
  AtomCloud c1 = normalized(atoms(space, d1));
  std::size_t n0 = c0.pos.size(), n1 = c1.pos.size();
  if (n0 > 64 || n1 > 64)
    throw std::invalid_argument("w2_lp_oracle: limited to 64 atoms per side");

  std::vector<std::vector<double>> cost(n0, std::vector<double>(n1));
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      double d = space.distance(c0.pos[i], c1.pos[j]);
      cost[i][j] = d * d;
    }

  // Successive shortest augmenting paths on the bipartite residual graph.
  // Bellman-Ford tolerates the negative reverse arcs; shortest-path
  // augmentation keeps the residual graph free of negative cycles.
  std::vector<std::vector<double>> flow(n0, std::vector<double>(n1, 0.0));
  std::vector<double> supply = c0.mass, demand = c1.mass;
  double remaining = 1.0;
  while (remaining > 1e-14) {
    std::size_t nn = n0 + n1;
    std::vector<double> dist(nn, kInf);
    std::vector<int> parent(nn, -1);
    for (std::size_t i = 0; i < n0; ++i)
      if (supply[i] > 1e-15) dist[i] = 0.0;
    for (std::size_t it = 0; it < nn; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < n0; ++i) {
        if (dist[i] == kInf) continue;
        for (std::size_t j = 0; j < n1; ++j) {
          double nd = dist[i] + cost[i][j];
          if (nd < dist[n0 + j] - 1e-15) {
            dist[n0 + j] = nd;
            parent[n0 + j] = static_cast<int>(i);
            changed = true;
          }
        }
      }
      for (std::size_t j = 0; j < n1; ++j) {
        if (dist[n0 + j] == kInf) continue;
        for (std::size_t i = 0; i < n0; ++i) {
          if (flow[i][j] <= 0.0) continue;
          double nd = dist[n0 + j] - cost[i][j];
          if (nd < dist[i] - 1e-15) {
            dist[i] = nd;
            parent[i] = static_cast<int>(n0 + j);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    std::size_t best_sink = nn;
    for (std::size_t j = 0; j < n1; ++j)
      if (demand[j] > 1e-15 && dist[n0 + j] < (best_sink == nn ? kInf : dist[best_sink]))
        best_sink = n0 + j;
    if (best_sink == nn) break;

    double push = demand[best_sink - n0];
    for (std::size_t v = best_sink; parent[v] >= 0;) {
      std::size_t u = static_cast<std::size_t>(parent[v]);
      if (v >= n0)
        push = std::min(push, kInf);  // forward arc, uncapacitated
      else
        push = std::min(push, flow[v][u - n0]);
      v = u;
      if (parent[v] < 0) push = std::min(push, supply[v]);
    }
    for (std::size_t v = best_sink; parent[v] >= 0;) {
      std::size_t u = static_cast<std::size_t>(parent[v]);
      if (v >= n0)
        flow[u][v - n0] += push;
      else
        flow[v][u - n0] -= push;
      v = u;
      if (parent[v] < 0) supply[v] -= push;
    }
    demand[best_sink - n0] -= push;
    remaining -= push;
    if (push <= 0.0) break;
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) total += flow[i][j] * cost[i][j];
  return std::sqrt(std::max(0.0, total));
}

double w1_cdf_oracle(const grid::WeightedSpace& space, const grid::Density& d0,
                     const grid::Density& d1) {
  if (space.topology() != grid::Topology::segment)
    throw std::invalid_argument("w1_cdf_oracle: segment topology only");
  AtomCloud c0 = normalized(atoms(space, d0));
  AtomCloud c1 = normalized(atoms(space, d1));
  std::size_t i = 0, j = 0;
  double f0 = 0.0, f1 = 0.0, x_prev = 0.0, total = 0.0;
  bool started = false;
  while (i < c0.pos.size() || j < c1.pos.size()) {
    double x = std::min(i < c0.pos.size() ? c0.pos[i] : kInf,
                        j < c1.pos.size() ? c1.pos[j] : kInf);
    if (started) total += std::fabs(f0 - f1) * (x - x_prev);
    while (i < c0.pos.size() && c0.pos[i] <= x) f0 += c0.mass[i++];
    while (j < c1.pos.size() && c1.pos[j] <= x) f1 += c1.mass[j++];
    x_prev = x;
    started = true;
  }
  return total;
}

grid::Density displacement_interpolate(const grid::WeightedSpace& space, const grid::Density& d0,
                                       const grid::Density& d1, double t) {
  if (t < 0.0 || t > 1.0) throw std::invalid_argument("displacement_interpolate: t outside [0,1]");
  AtomCloud c0 = normalized(atoms(space, d0));
  AtomCloud c1 = normalized(atoms(space, d1));
  bool circle = space.topology() == grid::Topology::circle;

  StepFn q0 = quantile_steps(c0);
  StepFn q1;
  if (circle) {
    double theta = circle_cost(space, c0, c1, 2).theta;
    q1 = shifted_quantile(c1, theta, space.length());
  } else {
    q1 = quantile_steps(c1);
  }

  std::vector<double> cell_mass(space.n(), 0.0);
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < q0.hi.size() && j < q1.hi.size()) {
    double next = std::min(q0.hi[i], q1.hi[j]);
    double y = (1.0 - t) * q0.val[i] + t * q1.val[j];
    if (circle) {
      double rel = std::fmod(y - space.a(), space.length());
      if (rel < 0.0) rel += space.length();
      y = space.a() + rel;
    }
    deposit(space, y, next - u, cell_mass);
    u = next;
    if (q0.hi[i] <= next) ++i;
    if (j < q1.hi.size() && q1.hi[j] <= next) ++j;
  }

  grid::Density out;
  out.rho.resize(space.n());
  for (int k = 0; k < space.n(); ++k) out.rho[k] = cell_mass[k] / space.w()[k];
  return out;
}

}  // namespace phiflow::transport
