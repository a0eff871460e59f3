// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "reports.hpp"

using namespace sg;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t lines(const std::string& s) { return std::size_t(std::count(s.begin(), s.end(), '\n')); }

RunConfig small() {
  RunConfig c;
  c.solver.N = 64;
  c.solver.T = 0.05;
  c.output.snapshots = 3;
  return c;
}

}  // namespace

TEST_CASE("17 significant digits round trip") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
  CHECK(fmt17(0.1) == "0.10000000000000001");
}

TEST_CASE("ledger and snapshot columns") {
  const auto c = small();
  const PressureLaw law(c.law);
  const auto r = run(c.solver, law, c.output);
  const auto led = ledger_csv(r);
  CHECK(first_line(led).rfind("tau,mass,E_total,E_kinetic,E_internal,E_grav,BD_functional,rho_boundary,b_of_t,dt,acc_rhoP,acc_u3,", 0) == 0);
  CHECK(lines(led) == r.ledger.size() + 1);
  const auto snap = snapshot_csv(r.snapshots.back(), law);
  CHECK(first_line(snap) == "tau,j,x,r,rho,u,P,Phi_r");
  CHECK(lines(snap) == std::size_t(c.solver.N) + 1);
  // outermost cell: Phi_r = x / r^2 with x the mass below the cell center
  std::istringstream in(snap);
  std::string line, last;
  while (std::getline(in, line)) last = line;
  CHECK(last.find(",63,") != std::string::npos);
}

TEST_CASE("run directory layout") {
  const auto c = small();
  const PressureLaw law(c.law);
  const auto r = run(c.solver, law, c.output);
  const auto dir = std::filesystem::temp_directory_path() / "selfgrav_test_reports";
  std::filesystem::remove_all(dir);
  write_run(dir.string(), to_json(c), r, law);
  CHECK(std::filesystem::exists(dir / "config.json"));
  CHECK(std::filesystem::exists(dir / "ledger.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(std::filesystem::exists(dir / "snapshots" / "snapshot_000.csv"));
  CHECK(std::filesystem::exists(dir / "snapshots" / "snapshot_003.csv"));
  std::ifstream in(dir / "config.json");
  const json back = json::parse(in);
  CHECK(back == to_json(c));
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary and sweep reports") {
  const auto c = small();
  const PressureLaw law(c.law);
  const auto s = run_summary(run(c.solver, law, c.output));
  CHECK(s.at("failed") == false);
  CHECK(s.at("snapshot_times").size() == 4);
  CHECK(s.at("initial").at("profile") == "bump_shell");

  const auto sw = sweep_report(epsilon_sweep(c.solver, law, {0.1, 0.05, 0.025}, c.window, c.output));
  CHECK(sw.at("axis") == "eps");
  CHECK(sw.at("diff").size() == 3);
  CHECK(sw.at("consecutive").size() == 2);
  CHECK(sw.at("criteria").contains("bounds_within_2x"));
  CHECK(sw.at("monotone_note").get<std::string>().find("heuristic") == 0);
}

TEST_CASE("reports for the other modules") {
  RunConfig c;
  c.law.kind = LawKind::WhiteDwarf;
  const auto e = eos_report(c);
  CHECK(e.at("derived").at("gamma1") == 5.0 / 3.0);
  CHECK(e.at("d_high_fit").size() == 3);
  CHECK(e.at("table").size() > 10);

  RunConfig p;
  p.law.gamma = 1.3;
  const auto m = critical_mass_report(p);
  CHECK(m.at("M_c").get<double>() > 0);
  CHECK(m.at("samples").size() > 100);
  p.law.gamma = 2.0;
  CHECK_THROWS_AS(critical_mass_report(p), NotApplicable);

  RunConfig k;
  k.kernel.N = 64;
  k.kernel.rho_max = 1;
  k.dump_rho = 4;
  k.dump_u = 5;
  std::string dump;
  const auto kr = kernel_report(k, &dump);
  CHECK(first_line(dump) == "rho,v,chi,sigma_minus_u_chi");
  CHECK(lines(dump) == 4 * 5 + 1);
  CHECK(kr.contains("closed_form"));

  RunConfig g;
  g.goursat.N = 64;
  g.dump_rho = 3;
  g.dump_u = 7;
  const auto gr = special_entropy_report(g, &dump);
  CHECK(first_line(dump) == "rho,u,eta,eta_rho,eta_u,q");
  CHECK(lines(dump) == 3 * 7 + 1);
  CHECK(gr.at("fitted_ratio").get<double>() < 1);
}
