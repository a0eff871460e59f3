// SPDX-License-Identifier: MIT
#include <string>

#include "config.hpp"
#include "doctest.h"

using namespace sg;

namespace {

json minimal() {
  return json::parse(R"({"law": {"kind": "polytropic", "kappa": 1, "gamma": 2},
                         "solver": {"M": 1, "b": 100, "eps": 0.05, "N": 1024, "T": 1}})");
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const auto c = parse_config(minimal());
  CHECK(c.law.kind == LawKind::Polytropic);
  CHECK(c.law.gamma == 2.0);
  CHECK(c.solver.N == 1024);
  CHECK(c.solver.b == 100.0);
  CHECK(c.solver.eps == 0.05);
  CHECK(c.solver.cfl == 0.4);
  CHECK(c.solver.profile == Profile::BumpShell);
  CHECK(c.window.d == 0.1);
  CHECK(c.window.D == -1.0);
  CHECK(c.sweep_eps == std::vector<double>{0.1, 0.05, 0.025, 0.0125});
  CHECK(c.out_dir == "out");
  CHECK_NOTHROW(validate_for_solver(c));
  CHECK_NOTHROW(parse_config(json::object()));
}

TEST_CASE("effective config round trips") {
  const auto c = parse_config(minimal());
  const json e = to_json(c);
  CHECK(to_json(parse_config(e)) == e);
  CHECK(e.at("solver").at("N") == 1024);
}

TEST_CASE("out-of-range gamma is rejected") {
  auto j = minimal();
  j["law"]["gamma"] = 4;
  CHECK(error_of(j).find("gamma1") != std::string::npos);
  j["law"]["gamma"] = 1.1;
  const auto c = parse_config(j);
  CHECK_THROWS_AS(validate_for_solver(c), ConfigError);
}

TEST_CASE("eps = 0 points at the sweep") {
  auto j = minimal();
  j["solver"]["eps"] = 0;
  CHECK(error_of(j).find("sweep-epsilon") != std::string::npos);
}

TEST_CASE("unknown keys and wrong types name the field") {
  auto j = minimal();
  j["solver"]["Nx"] = 3;
  CHECK(error_of(j) == "solver.Nx: unknown key");
  j = minimal();
  j["extra"] = 1;
  CHECK(error_of(j) == "extra: unknown key");
  j = minimal();
  j["law"] = {{"kind", "white_dwarf"}, {"gamma", 2}};
  CHECK(error_of(j) == "law.gamma: unknown key");
  j = minimal();
  j["solver"]["N"] = 1.5;
  CHECK(error_of(j) == "solver.N: expected an integer");
  j = minimal();
  j["solver"]["T"] = "long";
  CHECK(error_of(j) == "solver.T: expected a number");
  j = minimal();
  j["solver"]["profile"] = "gaussian";
  CHECK(error_of(j).find("solver.profile") == 0);
  j = minimal();
  j["law"]["kind"] = "ideal";
  CHECK(error_of(j).find("law.kind") == 0);
  j = minimal();
  j["sweep"] = {{"eps", {0.1, -0.05}}};
  CHECK(error_of(j) == "sweep.eps: must be > 0");
  j = minimal();
  j["solver"]["M"] = 0;
  CHECK(error_of(j) == "solver.M: must be > 0");
}

TEST_CASE("overrides") {
  auto j = minimal();
  apply_override(j, "solver.N=2048");
  apply_override(j, "output.dir=results/a");
  apply_override(j, "window.D=0.5");
  apply_override(j, "law={\"kind\":\"white_dwarf\",\"C2\":2}");
  apply_override(j, "sweep.eps=[0.2,0.1]");
  const auto c = parse_config(j);
  CHECK(c.solver.N == 2048);
  CHECK(c.out_dir == "results/a");
  CHECK(c.window.D == 0.5);
  CHECK(c.solver.D == 0.5);
  CHECK(c.law.kind == LawKind::WhiteDwarf);
  CHECK(c.law.C2 == 2.0);
  CHECK(c.sweep_eps == std::vector<double>{0.2, 0.1});
  CHECK_THROWS_AS(apply_override(j, "solver.N"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "solver.N.x=3"), ConfigError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/config.json"), ConfigError);
}
