// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// JSON reports and CSV tables. Numbers in CSV use 17 significant digits.
#pragma once

#include <string>

#include "config.hpp"
#include "critical_mass.hpp"

namespace sg {

std::string fmt17(double v);

json eos_report(const RunConfig& c);
json critical_mass_report(const RunConfig& c);
// The dump goes to *dump when dump is non-null.
json special_entropy_report(const RunConfig& c, std::string* dump);
json kernel_report(const RunConfig& c, std::string* dump);

std::string ledger_csv(const RunResult& r);
std::string snapshot_csv(const Snapshot& s, const PressureLaw& law);
json run_summary(const RunResult& r);
json sweep_report(const SweepResult& s);

void write_text(const std::string& path, const std::string& text);
// config.json, ledger.csv, summary.json and snapshots/snapshot_NNN.csv under dir.
void write_run(const std::string& dir, const json& config, const RunResult& r, const PressureLaw& law);
std::string dump_json(const json& j);

}  // namespace sg
