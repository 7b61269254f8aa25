#include "phiflow/presets.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace phiflow::presets {

namespace {

std::function<double(double)> zero_fn() {
  return [](double) { return 0.0; };
}

grid::Density normalized(const grid::WeightedSpace& space, std::vector<double> values) {
  double total = 0.0;
  for (int i = 0; i < space.n(); ++i) total += values[i] * space.w()[i];
  if (total <= 0.0) throw std::runtime_error("preset density has no mass");
  for (double& v : values) v /= total;
  grid::Density d;
  d.rho = std::move(values);
  return d;
}

grid::Density gaussian_profile(const grid::WeightedSpace& space, double b, double s) {
  std::vector<double> v(space.n());
  for (int i = 0; i < space.n(); ++i) {
    double z = (space.x()[i] - b) / s;
    v[i] = std::exp(-0.5 * z * z);
  }
  return normalized(space, std::move(v));
}

}  // namespace

std::vector<std::pair<std::string, phi::PhiFunction>> tabulated_coefficients() {
  std::vector<std::pair<std::string, phi::PhiFunction>> out;
  out.emplace_back("classical_kink",
                   phi::PhiFunction::tabulated({0.25, 1.0, 4.0}, {0.35, 1.0, 2.2}));
  out.emplace_back("slow_fast", phi::PhiFunction::tabulated({0.1, 1.0, 10.0}, {0.2, 1.0, 3.5}));
  out.emplace_back("plateau",
                   phi::PhiFunction::tabulated({0.5, 1.0, 2.0, 8.0}, {0.8, 1.0, 1.15, 1.5}));
  out.emplace_back("steep_zero", phi::PhiFunction::tabulated({0.2, 1.0, 5.0}, {0.1, 1.0, 2.0}));
  out.emplace_back("near_linear",
                   phi::PhiFunction::tabulated({0.3, 1.0, 3.0}, {0.32, 1.0, 2.9}));
  return out;
}

FlowPreset flow_preset(const std::string& name, int n) {
  if (name == "heat_circle") {
    int cells = n > 0 ? n : 512;
    auto space = grid::WeightedSpace::circle(0.0, 8.0, cells, [](double) { return 0.0; });
    std::vector<double> v(cells);
    for (int i = 0; i < cells; ++i)
      v[i] = 1.0 + 0.8 * std::cos(2.0 * M_PI * (space.x()[i] - 4.0) / 8.0);
    grid::Density init = normalized(space, std::move(v));
    return FlowPreset{name,
                      flow::Problem{space, phi::PhiFunction::power(1.0), zero_fn(), zero_fn(),
                                    zero_fn(), zero_fn()},
                      init, 0.1, 1e-3, cells};
  }
  if (name == "pme_segment") {
    int cells = n > 0 ? n : 512;
    auto space = grid::WeightedSpace::segment(-4.0, 4.0, cells, [](double) { return 0.0; });
    std::vector<double> v(cells);
    for (int i = 0; i < cells; ++i) {
      double x = space.x()[i];
      v[i] = std::max(0.0, 1.0 - x * x);
    }
    grid::Density init = normalized(space, std::move(v));
    return FlowPreset{name,
                      flow::Problem{space, phi::PhiFunction::power(1.5), zero_fn(), zero_fn(),
                                    zero_fn(), zero_fn()},
                      init, 0.05, 1e-3, 256};
  }
  if (name == "ou_gaussian") {
    int cells = n > 0 ? n : 384;
    auto space = grid::WeightedSpace::segment(-8.0, 8.0, cells, [](double) { return 0.0; });
    grid::Density init = gaussian_profile(space, 1.0, 1.0);
    return FlowPreset{name,
                      flow::Problem{space, phi::PhiFunction::power(1.0),
                                    [](double x) { return 0.5 * x * x; },
                                    [](double x) { return x; }, zero_fn(), zero_fn()},
                      init, 0.5, 5e-3, 192};
  }
  if (name == "fast_diffusion") {
    int cells = n > 0 ? n : 384;
    auto space = grid::WeightedSpace::segment(-6.0, 6.0, cells, [](double) { return 0.0; });
    grid::Density init = gaussian_profile(space, 0.5, 0.8);
    return FlowPreset{name,
                      flow::Problem{space, phi::PhiFunction::power(0.75),
                                    [](double x) { return 0.5 * x * x; },
                                    [](double x) { return x; }, zero_fn(), zero_fn()},
                      init, 0.05, 1e-3, 192};
  }
  throw std::runtime_error("unknown flow preset: " + name);
}

std::vector<std::string> flow_preset_names() {
  return {"heat_circle", "pme_segment", "ou_gaussian", "fast_diffusion"};
}

ConcentratePreset concentrate_preset(const std::string& name, int n) {
  int cells = n > 0 ? n : 512;
  auto space = grid::WeightedSpace::segment(-8.0, 8.0, cells, [](double) { return 0.0; });
  auto quadratic = [&](double kappa) {
    std::vector<double> psi(cells);
    for (int i = 0; i < cells; ++i) psi[i] = 0.5 * kappa * space.x()[i] * space.x()[i];
    return psi;
  };
  if (name == "gauss_m1")
    return {name, grid::build_reference(space, phi::PhiFunction::power(1.0), quadratic(1.0)), 1.0};
  if (name == "gauss_m15")
    return {name, grid::build_reference(space, phi::PhiFunction::power(1.5), quadratic(1.0)), 1.0};
  if (name == "gauss_m2")
    return {name, grid::build_reference(space, phi::PhiFunction::power(2.0), quadratic(1.0)), 1.0};
  if (name == "gauss_m075")
    return {name, grid::build_reference(space, phi::PhiFunction::power(0.75), quadratic(1.0)),
            1.0};
  if (name == "quartic_m1") {
    std::vector<double> psi(cells);
    for (int i = 0; i < cells; ++i) {
      double x = space.x()[i];
      psi[i] = 0.5 * x * x + 0.025 * x * x * x * x;
    }
    return {name, grid::build_reference(space, phi::PhiFunction::power(1.0), psi), 1.0};
  }
  if (name == "gauss_scaled")
    return {name, grid::build_reference(space, phi::PhiFunction::power(1.0), quadratic(2.0)), 2.0};
  throw std::runtime_error("unknown concentrate preset: " + name);
}

std::vector<std::string> concentrate_preset_names() {
  return {"gauss_m1", "gauss_m15", "gauss_m2", "gauss_m075", "quartic_m1", "gauss_scaled"};
}

namespace {

grid::Density restricted(const grid::ReferenceSystem& ref, grid::Density d) {
  double total = 0.0;
  for (int i = 0; i < ref.space.n(); ++i) {
    if (!ref.support[i]) d.rho[i] = 0.0;
    total += d.rho[i] * ref.space.w()[i];
  }
  if (total <= 0.0) throw std::runtime_error("sampled density misses the reference support");
  for (double& r : d.rho) r /= total;
  return d;
}

grid::Density sample_one(const grid::ReferenceSystem& ref, std::mt19937_64& rng, int kind) {
  const grid::WeightedSpace& space = ref.space;
  std::uniform_real_distribution<double> shift(-1.2, 1.2), width(0.4, 0.9), mix(0.3, 0.7);
  std::vector<double> v(space.n());
  if (kind % 2 == 0) {
    double b = shift(rng), s = width(rng);
    for (int i = 0; i < space.n(); ++i) {
      double z = (space.x()[i] - b) / s;
      v[i] = std::exp(-0.5 * z * z);
    }
  } else {
    double a = mix(rng), b0 = shift(rng), s0 = width(rng), b1 = shift(rng), s1 = width(rng);
    for (int i = 0; i < space.n(); ++i) {
      double z0 = (space.x()[i] - b0) / s0;
      double z1 = (space.x()[i] - b1) / s1;
      v[i] = a * std::exp(-0.5 * z0 * z0) / s0 + (1.0 - a) * std::exp(-0.5 * z1 * z1) / s1;
    }
  }
  grid::Density d;
  d.rho = std::move(v);
  return restricted(ref, std::move(d));
}

}  // namespace

std::vector<grid::Density> sample_measures(const grid::ReferenceSystem& ref, int count,
                                           unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<grid::Density> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(sample_one(ref, rng, k));
  return out;
}

std::vector<std::pair<grid::Density, grid::Density>> sample_pairs(const grid::ReferenceSystem& ref,
                                                                  int count,
                                                                  unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<grid::Density, grid::Density>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    grid::Density first = sample_one(ref, rng, k);
    grid::Density second = sample_one(ref, rng, k + 1);
    out.emplace_back(std::move(first), std::move(second));
  }
  return out;
}

}  // namespace phiflow::presets
