#include <algorithm>
#include "phiflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phiflow::config {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Ini Ini::parse(const std::string& text) {
  Ini ini;
  std::istringstream stream(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) + ": unclosed section");
      section = trim(line.substr(1, line.size() - 2));
      ini.sections_[section];
      continue;
    }
    if (section.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": key outside any section");
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    ini.sections_[section][key] = value;
  }
  return ini;
}

Ini Ini::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool Ini::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool Ini::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kit = it->second.find(key);
  return kit == it->second.end() ? fallback : kit->second;
}

double Ini::get_double(const std::string& section, const std::string& key,
                       double fallback) const {
  if (!has(section, key)) return fallback;
  return std::stod(get(section, key, ""));
}

int Ini::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  return std::stoi(get(section, key, ""));
}

std::vector<double> Ini::get_doubles(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  std::string text = get(section, key, "");
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream stream(text);
  double v;
  while (stream >> v) out.push_back(v);
  return out;
}

namespace {

struct Weight {
  std::function<double(double)> f, df;
};

Weight make_weight(const Ini& ini) {
  std::string kind = ini.get("space", "weight", "zero");
  if (kind == "zero") return {[](double) { return 0.0; }, [](double) { return 0.0; }};
  if (kind == "linear") {
    double slope = ini.get_double("space", "slope", 1.0);
    return {[slope](double x) { return slope * x; }, [slope](double) { return slope; }};
  }
  if (kind == "cosine") {
    double amp = ini.get_double("space", "amp", 0.5);
    double a = ini.get_double("space", "a", 0.0);
    double len = ini.get_double("space", "b", 1.0) - a;
    double freq = 2.0 * M_PI / len;
    return {[amp, freq, a](double x) { return amp * std::cos(freq * (x - a)); },
            [amp, freq, a](double x) { return -amp * freq * std::sin(freq * (x - a)); }};
  }
  throw std::runtime_error("unknown weight kind: " + kind);
}

}  // namespace

grid::WeightedSpace make_space(const Ini& ini) {
  std::string topology = ini.get("space", "topology", "segment");
  double a = ini.get_double("space", "a", -8.0);
  double b = ini.get_double("space", "b", 8.0);
  int n = ini.get_int("space", "n", 256);
  Weight weight = make_weight(ini);
  if (topology == "segment") return grid::WeightedSpace::segment(a, b, n, weight.f);
  if (topology == "circle") return grid::WeightedSpace::circle(a, b, n, weight.f);
  throw std::runtime_error("unknown topology: " + topology);
}

phi::PhiFunction make_phi(const Ini& ini) {
  std::string kind = ini.get("phi", "kind", "power");
  if (kind == "power")
    return phi::PhiFunction::power(ini.get_double("phi", "m", 1.0),
                                   ini.get_double("phi", "scale", 1.0));
  if (kind == "tabulated") {
    auto knots = ini.get_doubles("phi", "knots");
    auto values = ini.get_doubles("phi", "values");
    return phi::PhiFunction::tabulated(knots, values);
  }
  throw std::runtime_error("unknown phi kind: " + kind);
}

Potential make_potential(const Ini& ini, const grid::WeightedSpace& space) {
  std::string kind = ini.get("potential", "kind", "zero");
  Potential p;
  p.kind = kind;
  if (kind == "zero") {
    p.value = [](double) { return 0.0; };
    p.derivative = [](double) { return 0.0; };
    return p;
  }
  if (kind == "quadratic") {
    double kappa = ini.get_double("potential", "kappa", 1.0);
    p.value = [kappa](double x) { return 0.5 * kappa * x * x; };
    p.derivative = [kappa](double x) { return kappa * x; };
    return p;
  }
  if (kind == "quartic") {
    // Quadratic core plus quartic stiffening keeps the curvature bounded
    // below by kappa.
    double kappa = ini.get_double("potential", "kappa", 1.0);
    double quartic = ini.get_double("potential", "quartic", 0.1);
    p.value = [kappa, quartic](double x) {
      return 0.5 * kappa * x * x + 0.25 * quartic * x * x * x * x;
    };
    p.derivative = [kappa, quartic](double x) { return kappa * x + quartic * x * x * x; };
    return p;
  }
  if (kind == "cosine") {
    double amp = ini.get_double("potential", "amp", 1.0);
    double freq = ini.get_double("potential", "freq", 2.0 * M_PI / space.length());
    p.value = [amp, freq](double x) { return amp * std::cos(freq * x); };
    p.derivative = [amp, freq](double x) { return -amp * freq * std::sin(freq * x); };
    return p;
  }
  if (kind == "linear") {
    double slope = ini.get_double("potential", "slope", 1.0);
    p.value = [slope](double x) { return slope * x; };
    p.derivative = [slope](double) { return slope; };
    return p;
  }
  throw std::runtime_error("unknown potential kind: " + kind);
}

flow::Problem make_problem(const Ini& ini) {
  grid::WeightedSpace space = make_space(ini);
  Potential pot = make_potential(ini, space);
  Weight weight = make_weight(ini);
  return flow::Problem{space, make_phi(ini), pot.value, pot.derivative, weight.f, weight.df};
}

grid::ReferenceSystem make_reference(const Ini& ini) {
  grid::WeightedSpace space = make_space(ini);
  Potential pot = make_potential(ini, space);
  return grid::build_reference(space, make_phi(ini), space.sample(pot.value));
}

}  // namespace phiflow::config
