#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "phiflow/config.hpp"

namespace phiflow::experiments {

using json = nlohmann::ordered_json;

struct Outcome {
  bool pass = false;
  json summary;
  /// (file name, contents) pairs for optional CSV side outputs.
  std::vector<std::pair<std::string, std::string>> csv_files;
};

/// Closed-form agreement and round trips for the power family.
Outcome phi_check(const std::vector<double>& ms);

/// Convexity-class membership scan against the analytic boundary.
Outcome dc_scan();

/// Two-sided comparison bounds for the named tabulated coefficients.
Outcome sandwich();

/// Displacement semi-convexity over sampled pairs plus the inverted-well
/// counterexample; [experiment] keys: pairs, seed, points.
Outcome convexity_experiment(const config::Ini& ini);

/// Transport, interpolation, and log-Sobolev style inequalities over sampled
/// measures, equality cases, and the spectral-gap probe; keys: measures, seed.
Outcome inequalities_experiment(const config::Ini& ini);

/// Concentration chain, closed-form tail bounds, exponential-moment route,
/// and the randomized pointwise inequality trials for one reference preset.
Outcome concentrate_experiment(const std::string& preset, double rmax, int n = 0);

/// Evolution scheme against its verification routes for one flow preset.
Outcome flow_experiment(const std::string& preset, double T, double delta, int panels,
                        int n = 0);

/// Projection onto quadratic-statistic families and the distance splitting.
Outcome expfamily_experiment(const config::Ini& ini);

/// Dispatch on [experiment] name =
/// phi-check|dc-scan|sandwich|convexity|inequalities|concentrate|flow|expfamily.
Outcome run_experiment(const config::Ini& ini);

/// Serializes with a fixed layout (no timestamps, fixed seeds), so equal
/// configurations produce byte-identical files.
std::string to_file_string(const json& summary);

}  // namespace phiflow::experiments
