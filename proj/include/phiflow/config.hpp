#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "phiflow/flow.hpp"
#include "phiflow/grid.hpp"
#include "phiflow/phi.hpp"

namespace phiflow::config {

/// Minimal ini reader: [section] headers, key = value lines, # or ;
/// comments.  Lookups fall back to defaults so configs stay short.
class Ini {
public:
  static Ini parse(const std::string& text);
  static Ini load(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// [space]: topology = segment|circle, a, b, n, weight = zero|linear|cosine
/// with slope/amp parameters (log-weight f).
grid::WeightedSpace make_space(const Ini& ini);

/// [phi]: kind = power (m, scale) | tabulated (knots, values).
phi::PhiFunction make_phi(const Ini& ini);

struct Potential {
  std::string kind;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// [potential]: kind = zero | quadratic (kappa = curvature) | quartic |
/// cosine (amp, freq) | linear (slope); quadratic+quartic blend via both.
Potential make_potential(const Ini& ini, const grid::WeightedSpace& space);

/// Full evolution problem from [space], [phi], [potential].
flow::Problem make_problem(const Ini& ini);

/// Reference system from the same sections.
grid::ReferenceSystem make_reference(const Ini& ini);

}  // namespace phiflow::config
