#pragma once

#include <vector>

#include "phiflow/grid.hpp"

namespace phiflow::transport {

/// Discrete measure as atoms at increasing positions; masses sum to one.
struct AtomCloud {
  std::vector<double> pos;
  std::vector<double> mass;
};

/// Cell-center atoms of a density; zero-mass cells are dropped.
AtomCloud atoms(const grid::WeightedSpace& space, const grid::Density& d);

/// Exact p-Wasserstein distance (p = 1 or 2) between two densities.  On
/// segments this merges the two step quantile functions; on circles the
/// monotone coupling is taken on the universal cover and minimized over the
/// mass-level shift between the quantiles (convex in the shift), by a coarse
/// scan plus golden-section refinement to 1e-6.
double wp(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1,
          int p);
double w1(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1);
double w2(const grid::WeightedSpace& space, const grid::Density& d0, const grid::Density& d1);

/// Exact quadratic-cost optimal transport via successive shortest augmenting
/// paths on the bipartite flow polytope.  Verification route for small
/// instances; both sides must have at most 64 atoms.
double w2_lp_oracle(const grid::WeightedSpace& space, const grid::Density& d0,
                    const grid::Density& d1);

/// Verification route for W1 on segments: integral of |F0 - F1| dx.
double w1_cdf_oracle(const grid::WeightedSpace& space, const grid::Density& d0,
                     const grid::Density& d1);

/// Monotone interpolation between the two quantile functions at time t in
/// [0,1], deposited back on the grid by linear (cloud-in-cell) splitting,
/// which conserves mass and, away from the boundary, the first moment.
grid::Density displacement_interpolate(const grid::WeightedSpace& space, const grid::Density& d0,
                                       const grid::Density& d1, double t);

}  // namespace phiflow::transport
