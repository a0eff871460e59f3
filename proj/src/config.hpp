// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Run configuration: a JSON document plus dotted-key overrides.
#pragma once

#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "goursat.hpp"
#include "json.hpp"
#include "kernel.hpp"
#include "solver.hpp"

namespace sg {

using json = nlohmann::ordered_json;

struct RunConfig {
  LawParams law;
  SolverSpec solver;
  Window window;
  OutputPolicy output;
  std::string out_dir = "out";

  std::vector<double> sweep_eps{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> sweep_b{100, 200, 400, 800};

  double eos_rho_min = 1e-8, eos_rho_max = 1e8;
  int eos_per_decade = 4;

  double E0 = 1.0;  // critical-mass energy level

  GoursatOptions goursat;
  KernelOptions kernel;
  int dump_rho = 64, dump_u = 65;  // dump grid: densities x velocities
};

// Unknown keys and wrong types are ConfigErrors naming the field.
RunConfig parse_config(const json& j);
json to_json(const RunConfig& c);

json read_json_file(const std::string& path);
// "solver.N=2048": the value is read as JSON, falling back to a string.
void apply_override(json& j, const std::string& assignment);

LawParams parse_law(const json& j);
json law_to_json(const LawParams& p);

// Builds the law and checks the solver preconditions.
void validate_for_solver(const RunConfig& c);

}  // namespace sg
