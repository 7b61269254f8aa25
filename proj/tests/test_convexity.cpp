#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phiflow/convexity.hpp"
#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"
#include "phiflow/transport.hpp"

using phiflow::grid::Density;
using phiflow::grid::ReferenceSystem;
using phiflow::grid::WeightedSpace;
using phiflow::phi::PhiFunction;
namespace convexity = phiflow::convexity;

namespace {

ReferenceSystem gaussian_reference(double m, int n = 256, double kappa = 0.5) {
  auto space = WeightedSpace::segment(-8.0, 8.0, n, [](double) { return 0.0; });
  std::vector<double> psi(n);
  for (int i = 0; i < n; ++i) psi[i] = kappa * space.x()[i] * space.x()[i];
  return phiflow::grid::build_reference(space, PhiFunction::power(m), psi);
}

Density normalize(const WeightedSpace& space, std::vector<double> v) {
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) total += v[i] * space.w()[i];
  for (double& r : v) r /= total;
  Density d;
  d.rho = std::move(v);
  return d;
}

Density gaussian(const WeightedSpace& space, double b, double s) {
  std::vector<double> v(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double z = (space.x()[i] - b) / s;
    v[i] = std::exp(-0.5 * z * z);
  }
  return normalize(space, std::move(v));
}

Density mixture(const WeightedSpace& space, double a, double b0, double s0, double b1, double s1) {
  std::vector<double> v(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double z0 = (space.x()[i] - b0) / s0;
    double z1 = (space.x()[i] - b1) / s1;
    v[i] = a * std::exp(-0.5 * z0 * z0) / s0 + (1.0 - a) * std::exp(-0.5 * z1 * z1) / s1;
  }
  return normalize(space, std::move(v));
}

/// Restrict a density to the support of the reference and renormalize, so
/// the pair stays inside the admissible class.
Density restricted(const ReferenceSystem& ref, Density d) {
  for (int i = 0; i < ref.space.n(); ++i)
    if (!ref.support[i]) d.rho[i] = 0.0;
  return normalize(ref.space, std::move(d.rho));
}

std::vector<std::pair<Density, Density>> sample_pairs(const ReferenceSystem& ref, int count,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> shift(-1.2, 1.2);
  std::uniform_real_distribution<double> width(0.4, 0.9);
  std::uniform_real_distribution<double> frac(0.25, 0.75);
  std::vector<std::pair<Density, Density>> pairs;
  for (int k = 0; k < count; ++k) {
    Density d0, d1;
    if (k % 3 == 0) {
      d0 = gaussian(ref.space, shift(rng), width(rng));
      d1 = gaussian(ref.space, shift(rng), width(rng));
    } else if (k % 3 == 1) {
      d0 = mixture(ref.space, frac(rng), shift(rng), width(rng), shift(rng), width(rng));
      d1 = gaussian(ref.space, shift(rng), width(rng));
    } else {
      d0 = mixture(ref.space, frac(rng), shift(rng), width(rng), shift(rng), width(rng));
      d1 = mixture(ref.space, frac(rng), shift(rng), width(rng), shift(rng), width(rng));
    }
    pairs.emplace_back(restricted(ref, std::move(d0)), restricted(ref, std::move(d1)));
  }
  return pairs;
}

}  // namespace

TEST_SUITE("convexity") {

TEST_CASE("entropy is displacement convex with the classical modulus") {
  auto ref = gaussian_reference(1.0);
  auto pairs = sample_pairs(ref, 8, 2024);
  for (const auto& [d0, d1] : pairs) {
    auto rep = convexity::convexity_deficit(ref, d0, d1, 1.0);
    CHECK(rep.min_slack >= -0.01);
    CHECK(rep.t.size() == 33);
  }
  double k_hat = convexity::estimate_K(ref, pairs, 0.0, 3.0, 0.01);
  CHECK(k_hat >= 0.9);
  CHECK(k_hat <= 1.15);
}

TEST_CASE("power-law entropies keep the modulus of the potential") {
  for (double m : {0.9, 1.2}) {
    CAPTURE(m);
    auto ref = gaussian_reference(m);
    auto pairs = sample_pairs(ref, 4, 77);
    for (const auto& [d0, d1] : pairs) {
      auto rep = convexity::convexity_deficit(ref, d0, d1, 1.0);
      CHECK(rep.min_slack >= -0.01);
    }
  }
}

TEST_CASE("an inverted well breaks the convexity inequality") {
  auto space = WeightedSpace::segment(-3.0, 3.0, 256, [](double) { return 0.0; });
  std::vector<double> psi(space.n());
  for (int i = 0; i < space.n(); ++i) psi[i] = -0.5 * space.x()[i] * space.x()[i];
  auto ref = phiflow::grid::build_reference(space, PhiFunction::power(1.0), psi);
  auto d0 = gaussian(space, -1.5, 0.35);
  auto d1 = gaussian(space, 1.5, 0.35);
  auto rep = convexity::convexity_deficit(ref, d0, d1, 1.0);
  CHECK(rep.min_slack < -0.05);
}

TEST_CASE("a stiffer well doubles the estimated modulus") {
  auto ref = gaussian_reference(1.0, 256, 1.0);  // potential x^2, curvature 2
  std::vector<std::pair<Density, Density>> pairs;
  pairs.emplace_back(gaussian(ref.space, 0.2, 0.7), gaussian(ref.space, 0.9, 0.7));
  pairs.emplace_back(gaussian(ref.space, -0.5, 0.6), gaussian(ref.space, 0.5, 0.6));
  pairs.emplace_back(mixture(ref.space, 0.5, -0.8, 0.5, 0.8, 0.5), gaussian(ref.space, 0.0, 0.8));
  double k_hat = convexity::estimate_K(ref, pairs, 0.0, 4.0, 0.01);
  CHECK(k_hat >= 1.9);
  CHECK(k_hat <= 2.2);
}

TEST_CASE("entropy decreases along the transport direction at the predicted rate") {
  auto ref = gaussian_reference(1.0);
  double b0 = 0.4, b1 = 1.2;
  auto check = convexity::directional_derivative(ref, gaussian(ref.space, b0, 1.0),
                                                 gaussian(ref.space, b1, 1.0));
  double expected = b0 * (b1 - b0);
  CHECK(check.numeric == doctest::Approx(expected).epsilon(0.02));
  CHECK(check.analytic == doctest::Approx(expected).epsilon(0.02));
  CHECK(std::fabs(check.numeric - check.analytic) <= 0.02 * std::max(1.0, std::fabs(expected)));
}

TEST_CASE("transport, entropy and information close the triangle on shifted profiles") {
  auto ref = gaussian_reference(1.0);
  for (double b : {0.5, 1.0, 1.5}) {
    auto rep = convexity::functional_inequalities(ref, gaussian(ref.space, b, 1.0), 1.0);
    CHECK(rep.gap == doctest::Approx(oracles::gauss_shift_entropy(b)).epsilon(1e-5));
    CHECK(rep.w2 == doctest::Approx(oracles::gauss_shift_w2(b)).epsilon(1e-6));
    CHECK(rep.fisher == doctest::Approx(oracles::gauss_shift_fisher(b)).epsilon(1e-5));
    CHECK(std::fabs(rep.talagrand_slack) <= 0.01);
    CHECK(std::fabs(rep.hwi_slack) <= 0.01);
    CHECK(std::fabs(rep.lsi_slack) <= 0.01);
  }
}

TEST_CASE("the three inequalities hold on generic measures") {
  auto ref = gaussian_reference(1.0);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  for (int k = 0; k < 6; ++k) {
    auto mu = mixture(ref.space, 0.3 + 0.1 * k, shift(rng), 0.5 + 0.05 * k, shift(rng), 0.8);
    auto rep = convexity::functional_inequalities(ref, mu, 1.0);
    CHECK(rep.talagrand_slack >= -0.01);
    CHECK(rep.hwi_slack >= -0.01);
    CHECK(rep.lsi_slack >= -0.01);
  }
}

TEST_CASE("the linearized inequality is sharp on the first polynomial mode") {
  for (int n : {128, 256}) {
    auto ref = gaussian_reference(1.0, n);
    std::vector<double> w(ref.space.x());
    auto rep = convexity::poincare(ref, w, 1.0);
    CHECK(std::fabs(rep.slack) <= 0.02);
    CAPTURE(n);
  }
  // Finer grids tighten the near-equality.
  auto coarse = convexity::poincare(gaussian_reference(1.0, 128), gaussian_reference(1.0, 128).space.x(), 1.0);
  auto fine = convexity::poincare(gaussian_reference(1.0, 256), gaussian_reference(1.0, 256).space.x(), 1.0);
  CHECK(std::fabs(fine.slack) <= std::fabs(coarse.slack) + 1e-12);

  // Strictly positive slack away from the extremal observable.
  auto ref = gaussian_reference(1.0);
  std::vector<double> w2(ref.space.n());
  for (int i = 0; i < ref.space.n(); ++i) w2[i] = ref.space.x()[i] * ref.space.x()[i];
  auto rep = convexity::poincare(ref, w2, 1.0);
  CHECK(rep.slack > 0.5);

  // Power-law coefficient: the inequality persists.
  auto ref12 = gaussian_reference(1.2);
  auto rep12 = convexity::poincare(ref12, ref12.space.x(), 1.0);
  CHECK(rep12.slack >= -0.02);
}

}  // TEST_SUITE
