#pragma once

#include <string>
#include <utility>
#include <vector>

#include "phiflow/flow.hpp"
#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"

namespace phiflow::presets {

/// Named tabulated coefficient functions with distinct elasticity profiles
/// (kinks, plateaus, near-linear), all equal to one at s = 1 and with order
/// indices inside the window the comparison bounds cover.
std::vector<std::pair<std::string, phi::PhiFunction>> tabulated_coefficients();

struct FlowPreset {
  std::string name;
  flow::Problem problem;
  grid::Density initial;
  double T = 0.1;
  double delta = 1e-3;
  int panels = 256;
};

/// heat_circle, pme_segment, ou_gaussian, fast_diffusion; n = 0 keeps the
/// preset's default resolution.
FlowPreset flow_preset(const std::string& name, int n = 0);
std::vector<std::string> flow_preset_names();

struct ConcentratePreset {
  std::string name;
  grid::ReferenceSystem ref;
  double K = 1.0;  // curvature lower bound of the potential
};

/// gauss_m1, gauss_m15, gauss_m2, gauss_m075, quartic_m1, gauss_scaled.
ConcentratePreset concentrate_preset(const std::string& name, int n = 0);
std::vector<std::string> concentrate_preset_names();

/// Deterministic measure sampler shared by the displacement-convexity and
/// inequality experiments: Gaussian profiles and two-bump mixtures, clipped
/// to the reference support and renormalized.
std::vector<grid::Density> sample_measures(const grid::ReferenceSystem& ref, int count,
                                           unsigned long long seed);
std::vector<std::pair<grid::Density, grid::Density>> sample_pairs(const grid::ReferenceSystem& ref,
                                                                  int count,
                                                                  unsigned long long seed);

}  // namespace phiflow::presets
