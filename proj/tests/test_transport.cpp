#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phiflow/grid.hpp"
#include "phiflow/transport.hpp"

using phiflow::grid::Density;
using phiflow::grid::WeightedSpace;
namespace transport = phiflow::transport;

namespace {

static const double kTolExact = 1e-12;
static const double kTolDual = 1e-10;

Density normalized_density(const WeightedSpace& space, const std::vector<double>& values) {
  Density d;
  d.rho = values;
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) total += d.rho[i] * space.w()[i];
  for (double& r : d.rho) r /= total;
  return d;
}

Density indicator(const WeightedSpace& space, const std::vector<std::pair<int, double>>& cells) {
  std::vector<double> v(space.n(), 0.0);
  for (auto [idx, m] : cells) v[idx] = m / space.w()[idx];
  Density d;
  d.rho = v;
  return d;
}

Density wrapped_bump(const WeightedSpace& space, double center, double width) {
  std::vector<double> v(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double dist = space.distance(space.x()[i], center);
    v[i] = std::exp(-0.5 * dist * dist / (width * width));
  }
  return normalized_density(space, v);
}

Density random_density(const WeightedSpace& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::vector<double> v(space.n());
  for (double& r : v) r = unif(rng);
  return normalized_density(space, v);
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("point masses move by the grid distance") {
  auto space = WeightedSpace::segment(0.0, 4.0, 8, [](double) { return 0.0; });
  // Cell centers sit at 0.25 + 0.5 k.
  auto d0 = indicator(space, {{1, 1.0}});
  auto d1 = indicator(space, {{6, 1.0}});
  CHECK(transport::w1(space, d0, d1) == doctest::Approx(2.5).epsilon(kTolExact));
  CHECK(transport::w2(space, d0, d1) == doctest::Approx(2.5).epsilon(kTolExact));

  auto split = indicator(space, {{0, 0.5}, {2, 0.5}});
  auto middle = indicator(space, {{1, 1.0}});
  CHECK(transport::w1(space, split, middle) == doctest::Approx(0.5).epsilon(kTolExact));
  CHECK(transport::w2(space, split, middle) == doctest::Approx(0.5).epsilon(kTolExact));
}

TEST_CASE("quantile distance agrees with the flow solver on segments") {
  auto space = WeightedSpace::segment(-2.0, 3.0, 32, [](double x) { return 0.3 * x; });
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 5; ++trial) {
    auto d0 = random_density(space, rng);
    auto d1 = random_density(space, rng);
    double quantile = transport::w2(space, d0, d1);
    double flow = transport::w2_lp_oracle(space, d0, d1);
    CHECK(std::fabs(quantile - flow) <= kTolDual);
    double direct = transport::w1(space, d0, d1);
    double cdf = transport::w1_cdf_oracle(space, d0, d1);
    CHECK(std::fabs(direct - cdf) <= kTolDual);
  }
}

TEST_CASE("circle distance agrees with the flow solver and respects the seam") {
  auto space = WeightedSpace::circle(0.0, 1.0, 32, [](double x) { return std::sin(2.0 * M_PI * x); });
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 4; ++trial) {
    auto d0 = random_density(space, rng);
    auto d1 = random_density(space, rng);
    double cutmin = transport::w2(space, d0, d1);
    double flow = transport::w2_lp_oracle(space, d0, d1);
    CHECK(std::fabs(cutmin - flow) <= 1e-9);
  }

  // Bumps at 0.875 and 0.125 are 0.25 apart through the seam, 0.75 around.
  auto flat = WeightedSpace::circle(0.0, 1.0, 32, [](double) { return 0.0; });
  auto b0 = wrapped_bump(flat, 0.875, 0.03);
  auto b1 = wrapped_bump(flat, 0.125, 0.03);
  double d = transport::w2(flat, b0, b1);
  CHECK(d == doctest::Approx(0.25).epsilon(0.02));
  CHECK(std::fabs(d - transport::w2_lp_oracle(flat, b0, b1)) <= 1e-9);
}

TEST_CASE("shifted profiles move rigidly") {
  auto space = WeightedSpace::segment(-8.0, 8.0, 256, [](double) { return 0.0; });
  double h = space.h();
  double b = 16.0 * h;  // exactly 16 cells, so the shifted atoms stay on centers
  std::vector<double> v0(space.n()), v1(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double x = space.x()[i];
    v0[i] = std::exp(-0.5 * x * x);
    v1[i] = std::exp(-0.5 * (x - b) * (x - b));
  }
  auto d0 = normalized_density(space, v0);
  auto d1 = normalized_density(space, v1);
  CHECK(transport::w2(space, d0, d1) == doctest::Approx(b).epsilon(1e-11));
  CHECK(transport::w1(space, d0, d1) == doctest::Approx(b).epsilon(1e-11));
}

TEST_CASE("interpolation hits the endpoints and conserves mass and moment") {
  auto space = WeightedSpace::segment(-8.0, 8.0, 256, [](double) { return 0.0; });
  double h = space.h();
  double b = 16.0 * h;
  std::vector<double> v0(space.n()), v1(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double x = space.x()[i];
    v0[i] = std::exp(-0.5 * x * x);
    v1[i] = std::exp(-0.5 * (x - b) * (x - b));
  }
  auto d0 = normalized_density(space, v0);
  auto d1 = normalized_density(space, v1);

  auto at0 = transport::displacement_interpolate(space, d0, d1, 0.0);
  auto at1 = transport::displacement_interpolate(space, d0, d1, 1.0);
  for (int i = 0; i < space.n(); ++i) {
    CHECK(at0.rho[i] == doctest::Approx(d0.rho[i]).epsilon(1e-11));
    CHECK(at1.rho[i] == doctest::Approx(d1.rho[i]).epsilon(1e-11));
  }

  auto mid = transport::displacement_interpolate(space, d0, d1, 0.5);
  double mass = 0.0, moment = 0.0, moment0 = 0.0, moment1 = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    mass += mid.rho[i] * space.w()[i];
    moment += mid.rho[i] * space.w()[i] * space.x()[i];
    moment0 += d0.rho[i] * space.w()[i] * space.x()[i];
    moment1 += d1.rho[i] * space.w()[i] * space.x()[i];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(kTolExact));
  CHECK(moment == doctest::Approx(0.5 * (moment0 + moment1)).epsilon(1e-10));

  // The halfway point of a rigid shift by 16 cells is the shift by 8 cells,
  // whose atoms land exactly on centers again.
  std::vector<double> vm(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double x = space.x()[i];
    vm[i] = std::exp(-0.5 * (x - 0.5 * b) * (x - 0.5 * b));
  }
  auto exact_mid = normalized_density(space, vm);
  for (int i = 0; i < space.n(); ++i)
    CHECK(mid.rho[i] == doctest::Approx(exact_mid.rho[i]).epsilon(1e-9));

  // Geodesic property along the interpolation.
  CHECK(transport::w2(space, d0, mid) == doctest::Approx(0.5 * b).epsilon(1e-9));
}

TEST_CASE("circle interpolation moves mass through the seam") {
  auto space = WeightedSpace::circle(0.0, 1.0, 64, [](double) { return 0.0; });
  auto b0 = wrapped_bump(space, 0.875, 0.03);
  auto b1 = wrapped_bump(space, 0.125, 0.03);
  auto mid = transport::displacement_interpolate(space, b0, b1, 0.5);
  double mass = 0.0, near_seam = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    double m = mid.rho[i] * space.w()[i];
    mass += m;
    if (space.distance(space.x()[i], 0.0) < 0.15) near_seam += m;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(kTolExact));
  CHECK(near_seam > 0.8);
}

TEST_CASE("identical measures are at distance zero") {
  auto space = WeightedSpace::segment(0.0, 1.0, 16, [](double x) { return x; });
  std::mt19937_64 rng(42);
  auto d = random_density(space, rng);
  CHECK(transport::w2(space, d, d) <= kTolExact);
  CHECK(transport::w2_lp_oracle(space, d, d) <= 1e-8);
}

TEST_CASE("flow solver rejects oversized instances") {
  auto space = WeightedSpace::segment(0.0, 1.0, 128, [](double) { return 0.0; });
  std::vector<double> v(space.n(), 1.0);
  auto d = normalized_density(space, v);
  CHECK_THROWS_AS(transport::w2_lp_oracle(space, d, d), std::invalid_argument);
}

}  // TEST_SUITE
