#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "phiflow/config.hpp"
#include "phiflow/experiments.hpp"

using phiflow::config::Ini;
namespace experiments = phiflow::experiments;

TEST_SUITE("config") {

  TEST_CASE("ini text parses into sections, keys, and typed values") {
    auto ini = Ini::parse(
        "# leading comment\n"
        "[space]\n"
        "topology = segment   ; trailing comment\n"
        "a = -2.5\n"
        "b = 2.5\n"
        "n = 64\n"
        "\n"
        "[phi]\n"
        "kind = power\n"
        "m = 1.5\n"
        "knots = 0.25, 1.0, 4.0\n");
    CHECK(ini.has_section("space"));
    CHECK(!ini.has_section("potential"));
    CHECK(ini.has("phi", "m"));
    CHECK(!ini.has("phi", "scale"));
    CHECK(ini.get("space", "topology", "") == "segment");
    CHECK(ini.get_double("space", "a", 0.0) == -2.5);
    CHECK(ini.get_int("space", "n", 0) == 64);
    CHECK(ini.get_double("phi", "scale", 1.0) == 1.0);
    auto knots = ini.get_doubles("phi", "knots");
    REQUIRE(knots.size() == 3);
    CHECK(knots[1] == 1.0);
  }

  TEST_CASE("malformed lines and missing files are rejected") {
    CHECK_THROWS_AS(Ini::parse("[space]\nthis line has no equals sign\n"), std::runtime_error);
    CHECK_THROWS_AS(Ini::parse("key = before any section\n"), std::runtime_error);
    CHECK_THROWS_AS(Ini::load("/nonexistent/path.ini"), std::runtime_error);
  }

  TEST_CASE("spaces, coefficients, and potentials build from snippets") {
    auto ini = Ini::parse(
        "[space]\n"
        "topology = circle\n"
        "a = 0\n"
        "b = 4\n"
        "n = 32\n"
        "weight = cosine\n"
        "amp = 0.3\n"
        "[phi]\n"
        "kind = power\n"
        "m = 1.2\n"
        "[potential]\n"
        "kind = quadratic\n"
        "kappa = 2.0\n");
    auto space = phiflow::config::make_space(ini);
    CHECK(space.n() == 32);
    CHECK(space.length() == 4.0);
    CHECK(space.f()[0] != 0.0);

    auto phi = phiflow::config::make_phi(ini);
    CHECK(phi.is_power());
    CHECK(phi.power_m() == 1.2);
    CHECK(phi(2.0) == doctest::Approx(std::pow(2.0, 0.8)));

    auto pot = phiflow::config::make_potential(ini, space);
    CHECK(pot.value(1.5) == doctest::Approx(0.5 * 2.0 * 1.5 * 1.5));
    CHECK(pot.derivative(1.5) == doctest::Approx(2.0 * 1.5));

    auto problem = phiflow::config::make_problem(ini);
    CHECK(problem.space.n() == 32);
    CHECK(problem.dpsi(1.0) == doctest::Approx(2.0));
  }

  TEST_CASE("tabulated coefficients round-trip through the config") {
    auto ini = Ini::parse(
        "[phi]\n"
        "kind = tabulated\n"
        "knots = 0.25, 1.0, 4.0\n"
        "values = 0.35, 1.0, 2.2\n");
    auto phi = phiflow::config::make_phi(ini);
    CHECK(!phi.is_power());
    CHECK(phi(1.0) == doctest::Approx(1.0));
    CHECK(phi(0.25) == doctest::Approx(0.35));
    CHECK(phi(4.0) == doctest::Approx(2.2));
  }

}  // TEST_SUITE

TEST_SUITE("experiments") {

  TEST_CASE("dispatch runs the named experiment and rejects unknown names") {
    auto ini = Ini::parse("[experiment]\nname = phi-check\nm = 1.0, 1.5\n");
    auto outcome = experiments::run_experiment(ini);
    CHECK(outcome.pass);
    CHECK(outcome.summary["experiment"] == "phi-check");
    CHECK(outcome.summary["families"].size() == 2);

    CHECK_THROWS_AS(experiments::run_experiment(Ini::parse("[experiment]\nname = bogus\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(experiments::run_experiment(Ini::parse("[other]\nname = flow\n")),
                    std::runtime_error);
  }

  TEST_CASE("equal configurations serialize to byte-identical summaries") {
    auto ini = Ini::parse("[experiment]\nname = inequalities\nmeasures = 25\nn = 128\n");
    auto first = experiments::run_experiment(ini);
    auto second = experiments::run_experiment(ini);
    CHECK(first.pass);
    CHECK(experiments::to_file_string(first.summary) ==
          experiments::to_file_string(second.summary));
  }

  TEST_CASE("a reduced evolution run passes its ledger and verification route") {
    auto ini = Ini::parse(
        "[experiment]\n"
        "name = flow\n"
        "preset = heat_circle\n"
        "T = 0.02\n"
        "delta = 0.004\n"
        "panels = 64\n"
        "n = 128\n");
    auto outcome = experiments::run_experiment(ini);
    CHECK(outcome.pass);
    CHECK(outcome.summary["checks"]["first_order_residual"].get<bool>());
    CHECK(outcome.summary["checks"]["matches_verification_route"].get<bool>());
    REQUIRE(!outcome.csv_files.empty());
    CHECK(outcome.csv_files[0].first == "flow_steps.csv");
    CHECK(outcome.csv_files[0].second.rfind("step,t,", 0) == 0);
  }

  TEST_CASE("a reduced tail-bound run emits the profile table") {
    auto ini = Ini::parse(
        "[experiment]\n"
        "name = concentrate\n"
        "preset = gauss_m15\n"
        "rmax = 2.0\n"
        "n = 256\n");
    auto outcome = experiments::run_experiment(ini);
    CHECK(outcome.pass);
    REQUIRE(!outcome.csv_files.empty());
    CHECK(outcome.csv_files[0].first == "concentration.csv");
    CHECK(outcome.csv_files[0].second.rfind("r,alpha,", 0) == 0);
  }

}  // TEST_SUITE
