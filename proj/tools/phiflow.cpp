#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phiflow/config.hpp"
#include "phiflow/experiments.hpp"
#include "phiflow/presets.hpp"

namespace {

namespace experiments = phiflow::experiments;

void print_human(const experiments::json& summary) {
  for (const auto& [key, value] : summary.items()) {
    if (key == "checks" || key == "pass") continue;
    if (value.is_structured()) {
      std::cout << "  " << key << ": [" << value.size() << " entries]\n";
      continue;
    }
    std::cout << "  " << key << ": " << value.dump() << "\n";
  }
  if (summary.contains("checks")) {
    for (const auto& [name, ok] : summary["checks"].items())
      std::cout << "  check " << name << ": " << (ok.get<bool>() ? "ok" : "FAILED") << "\n";
  }
  std::cout << (summary["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
}

int emit(const experiments::Outcome& outcome, const std::string& out_dir, bool as_json) {
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream file(std::filesystem::path(out_dir) / "summary.json", std::ios::binary);
    file << experiments::to_file_string(outcome.summary);
    for (const auto& [name, text] : outcome.csv_files) {
      std::ofstream csv(std::filesystem::path(out_dir) / name, std::ios::binary);
      csv << text;
    }
  }
  if (as_json)
    std::cout << experiments::to_file_string(outcome.summary);
  else
    print_human(outcome.summary);
  return outcome.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized-entropy calculus, inequalities, and gradient flows on weighted"
               " one-dimensional spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool as_json = false;
  std::vector<double> ms;
  std::string flow_name = "heat_circle", conc_name = "gauss_m1";
  double T = 0.0, delta = 0.0, rmax = 4.0;
  int panels = 0, cells = 0;

  auto* run = app.add_subcommand("run", "run the experiment described by an ini config");
  run->add_option("config", config_path, "path to the ini file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* phi_check = app.add_subcommand("phi-check", "closed-form agreement for power coefficients");
  phi_check->add_option("--m", ms, "exponents to check (default: a spanning set)");

  auto* flow = app.add_subcommand("flow", "evolution scheme against its verification routes");
  flow->add_option("--preset", flow_name, "flow preset name")
      ->check(CLI::IsMember(phiflow::presets::flow_preset_names()));
  flow->add_option("--T", T, "final time (0 keeps the preset value)");
  flow->add_option("--delta", delta, "step size (0 keeps the preset value)");
  flow->add_option("--panels", panels, "quantile panels (0 keeps the preset value)");
  flow->add_option("--n", cells, "grid cells (0 keeps the preset value)");

  auto* conc = app.add_subcommand("concentrate", "tail bounds and the estimate chain");
  conc->add_option("--preset", conc_name, "reference preset name")
      ->check(CLI::IsMember(phiflow::presets::concentrate_preset_names()));
  conc->add_option("--rmax", rmax, "largest tail radius in the profile");
  conc->add_option("--n", cells, "grid cells (0 keeps the preset value)");

  for (auto* sub : {run, phi_check, flow, conc}) {
    sub->add_option("--out", out_dir, "directory for summary.json and csv side outputs");
    sub->add_flag("--json", as_json, "print the json summary instead of text");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    experiments::Outcome outcome;
    if (run->parsed())
      outcome = experiments::run_experiment(phiflow::config::Ini::load(config_path));
    else if (phi_check->parsed())
      outcome = experiments::phi_check(ms);
    else if (flow->parsed())
      outcome = experiments::flow_experiment(flow_name, T, delta, panels, cells);
    else
      outcome = experiments::concentrate_experiment(conc_name, rmax, cells);
    return emit(outcome, out_dir, as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
