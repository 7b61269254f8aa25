#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phiflow/phi.hpp"

namespace phiflow::grid {

enum class Topology { segment, circle };

/// Uniform 1-D cell grid carrying a log-weight f: cell i has center x_i,
/// weight w_i = exp(-f(x_i)) * h.  Circles identify b with a.
class WeightedSpace {
public:
  static WeightedSpace segment(double a, double b, int n_cells,
                               const std::function<double(double)>& f);
  static WeightedSpace circle(double a, double b, int n_cells,
                              const std::function<double(double)>& f);

  Topology topology() const { return topology_; }
  int n() const { return static_cast<int>(x_.size()); }
  double a() const { return a_; }
  double b() const { return b_; }
  double h() const { return h_; }
  double length() const { return b_ - a_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& w() const { return w_; }
  /// f at the left face of cell i (face between i-1 and i); for segments
  /// index 0 is the domain boundary.
  const std::vector<double>& f_face() const { return f_face_; }
  double total_weight() const { return total_weight_; }
  double distance(double x, double y) const;
  /// Additively rescales f (multiplies all weights by a constant).
  WeightedSpace with_f_shift(double shift) const;

  std::vector<double> sample(const std::function<double(double)>& g) const;

private:
  WeightedSpace() = default;
  Topology topology_ = Topology::segment;
  double a_ = 0.0, b_ = 1.0, h_ = 0.0, total_weight_ = 0.0;
  std::vector<double> x_, f_, w_, f_face_;
};

/// Nonnegative density with respect to the weighted volume; sum(rho*w) = 1.
struct Density {
  std::vector<double> rho;
};

Density density_from_values(const WeightedSpace& space, const std::vector<double>& values);
double mass(const WeightedSpace& space, const Density& d);
std::vector<double> cell_masses(const WeightedSpace& space, const Density& d);

/// Centered first difference; one-sided at segment ends, wrapping on circles.
std::vector<double> gradient(const WeightedSpace& space, const std::vector<double>& g);
/// Second difference; copies the adjacent interior value at segment ends.
std::vector<double> second_difference(const WeightedSpace& space, const std::vector<double>& g);

struct AdmissibilityReport {
  bool coefficient_unit_at_one = false;
  double theta = 0.0, delta = 0.0, N = 0.0;
  bool order_index_window = false;            // theta in [0, 3/2)
  bool potential_above_matching_bound = false;  // -psi < L of the 2-theta power form
  bool potential_above_range_bound = false;     // -psi < L of the coefficient itself
  bool window_nonempty = false;               // some cell has positive reference density
  bool integrable = false;                    // h(sigma) and sigma*ln(sigma) summable
  bool admissible = false;
  double min_hess_psi = 0.0;                  // second differences of the potential
  double min_ricci = 0.0;                     // with the dimension parameter N above
};

enum class NormalizeMode { shift, scale };

/// Reference measure sigma = exp_phi(-psi) on a weighted space, normalized to
/// unit mass either by shifting the potential or by rescaling the weight.
struct ReferenceSystem {
  WeightedSpace space;
  phi::PhiCalculus calc;
  std::vector<double> psi;        // normalized potential at centers
  std::vector<double> grad_psi;   // centered differences of psi
  double lambda = 0.0;            // shift applied to the raw potential
  double weight_rescale = 1.0;    // weight multiplier in scale mode
  std::vector<double> sigma;
  std::vector<char> support;      // sigma > 0
  Density nu;                     // reference density (= sigma)
  double H_nu = 0.0;              // entropy of the reference measure
  AdmissibilityReport report;

  double h_prime_at(int i) const { return calc.h_prime_from_potential(-psi[i]); }
};

/// Solves sum_i exp_phi(lambda - psi_i) w_i = 1 for lambda by bisection on
/// the monotone normalizer; |mass - 1| <= 1e-10 on return.
double normalize_potential(const WeightedSpace& space, const phi::PhiCalculus& calc,
                           const std::vector<double>& psi_raw);

ReferenceSystem build_reference(const WeightedSpace& space, const phi::PhiFunction& f,
                                const std::vector<double>& psi_raw,
                                NormalizeMode mode = NormalizeMode::shift);

/// Relative entropy of mu = rho*w against the reference; +inf when the
/// density sits where it must not or an integrand diverges.
double entropy_H(const ReferenceSystem& ref, const Density& mu);

/// Bregman divergence between two densities induced by the potential u.
double bregman(const ReferenceSystem& ref, const Density& mu, const Density& base);

/// Relative information functional: squared gradient of the driving quantity
/// ln_phi(rho) - ln_phi(sigma), integrated against mu.  Computed on the
/// support with one-sided differences at support edges.
double fisher_I(const ReferenceSystem& ref, const Density& mu);
/// Verification route through the flux form |grad v(rho)/rho + grad psi|^2.
double fisher_I_flux(const ReferenceSystem& ref, const Density& mu);

/// Pointwise f'' - (f')^2/(N-1); the correction drops at N = +inf and makes
/// the value -inf where f' != 0 at N = 1.
std::vector<double> ricci_N(const WeightedSpace& space, double N);

}  // namespace phiflow::grid
