// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Acceptance suite: criteria 1-8 with pinned tolerances.
#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace sg {

struct Check {
  std::string what;
  double value = 0, limit = 0;
  std::string op;  // "<=", ">=", "<", ">", "=="
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0, budget = 0;
  std::vector<Check> checks;
  std::string note;
  std::string error;  // exception text when the criterion could not run
};

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids);
// One line per criterion.
std::string acceptance_table(const std::vector<CriterionResult>& r, bool verbose);
json acceptance_json(const std::vector<CriterionResult>& r);

}  // namespace sg
