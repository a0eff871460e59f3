// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "critical_mass.hpp"
#include "reports.hpp"

namespace sg {

namespace {

using Clock = std::chrono::steady_clock;

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

class Checks {
 public:
  explicit Checks(CriterionResult& r) : r_(r) {}
  void le(const std::string& what, double v, double lim) { add(what, v, "<=", lim, v <= lim); }
  void ge(const std::string& what, double v, double lim) { add(what, v, ">=", lim, v >= lim); }
  void lt(const std::string& what, double v, double lim) { add(what, v, "<", lim, v < lim); }
  void gt(const std::string& what, double v, double lim) { add(what, v, ">", lim, v > lim); }
  void eq(const std::string& what, double v, double lim) { add(what, v, "==", lim, v == lim); }
  void yes(const std::string& what, bool ok) { add(what, ok ? 1 : 0, "==", 1, ok); }

 private:
  void add(const std::string& what, double v, const char* op, double lim, bool ok) {
    r_.checks.push_back({what, v, lim, op, ok && std::isfinite(v)});
  }
  CriterionResult& r_;
};

LawParams poly(double gamma, double kappa = 1.0) {
  LawParams p;
  p.kappa = kappa;
  p.gamma = gamma;
  return p;
}

LawParams white_dwarf(double C1 = 1, double C2 = 1, double C3 = 1) {
  LawParams p;
  p.kind = LawKind::WhiteDwarf;
  p.C1 = C1;
  p.C2 = C2;
  p.C3 = C3;
  return p;
}

LawParams p_delta(double delta = 1, double eps0 = 0.5) {
  LawParams p;
  p.kind = LawKind::PDelta;
  p.delta = delta;
  p.eps0 = eps0;
  return p;
}

void eos_closed_forms(CriterionResult& r) {
  Checks c(r);
  for (auto [C1, C2, C3] : {std::array<double, 3>{1, 1, 1}, {2, 1.5, 3}}) {
    const PressureLaw w(white_dwarf(C1, C2, C3));
    const std::string tag = "wd(" + g6(C1) + "," + g6(C2) + "," + g6(C3) + ") ";
    c.le(tag + "gamma1 - 5/3", std::fabs(w.gamma1() - 5.0 / 3.0), 0.0);
    c.le(tag + "gamma2 - 4/3", std::fabs(w.gamma2() - 4.0 / 3.0), 0.0);
    c.le(tag + "kappa1 rel", rel(w.kappa1(), C1 * std::pow(C2, 5) / (5 * std::sqrt(C3))), 1e-15);
    c.le(tag + "kappa2 rel", rel(w.kappa2(), C1 * std::pow(C2, 4) / 4), 1e-15);
    c.le(tag + "eps - 2/3", std::fabs(w.eps() - 2.0 / 3.0), 0.0);
    const double lo = 1e-8, hi = 1e8;
    c.le(tag + "|P/(kappa1 rho^5/3) - 1| at 1e-8", std::fabs(w.P(lo) / (w.kappa1() * std::pow(lo, 5.0 / 3)) - 1), 0.01);
    c.le(tag + "|P/(kappa2 rho^4/3) - 1| at 1e8", std::fabs(w.P(hi) / (w.kappa2() * std::pow(hi, 4.0 / 3)) - 1), 0.02);
  }
}

void d_law(CriterionResult& r) {
  Checks c(r);
  for (double g : {1.4, 5.0 / 3.0, 2.0, 2.5}) {
    const PressureLaw law(poly(g));
    double worst = 0;
    for (double rho = 1e-8; rho <= 1e8; rho *= 10) worst = std::max(worst, std::fabs(law.d(rho) - (1 + law.theta1())));
    c.le("poly gamma=" + g6(g) + " max |d - (1+theta)|", worst, 4 * std::numeric_limits<double>::epsilon());
  }
  const PressureLaw w(white_dwarf());
  const double dlim = 1 + w.theta2();
  std::vector<double> C;
  for (int dec = 0; dec < 2; ++dec) {
    const double a = w.rho_hi() * std::pow(10.0, dec);
    double sup = 0;
    for (int i = 0; i <= 40; ++i) {
      const double rho = a * std::pow(10.0, i / 40.0);
      sup = std::max(sup, std::fabs(w.d(rho) - dlim) * std::cbrt(rho * rho));
    }
    C.push_back(sup);
  }
  c.lt("wd C on first decade above rho^*", C[0], std::numeric_limits<double>::infinity());
  c.le("wd C ratio between the two decades - 1", std::fabs(C[1] / C[0] - 1), 0.2);
}

void critical_masses(CriterionResult& r) {
  Checks c(r);
  for (const auto& lp : {poly(1.22), poly(1.25), poly(1.3), p_delta()}) {
    const PressureLaw law(lp);
    const auto rep = critical_mass(law, 1.0);
    const std::string tag = std::string(kind_name(law.kind())) + " gamma2=" + g6(law.gamma2()) + " ";
    double worst = 0;
    for (const auto& s : rep.samples) worst = std::max(worst, s.residual_rel);
    c.le(tag + "max term-scaled root residual", worst, 1e-10);
    if (law.kind() == LawKind::Polytropic)
      c.le(tag + "|sup M_c - M_tilde| rel", rel(rep.M_c, rep.M_tilde), 1e-4);
    else
      c.gt(tag + "margin (M_tilde - M_c)/M_tilde", (rep.M_tilde - rep.M_c) / rep.M_tilde, 0.0);
  }
  const auto a = lane_emden(1.0, 1.0), b = lane_emden(1.0, 100.0), h = lane_emden(1.0, 1.0, 2000);
  c.le("M_ch central density 1 vs 100 rel", rel(b.mass, a.mass), 1e-8);
  c.le("M_ch step halving rel", rel(h.mass, a.mass), 1e-6);
  const double k2 = 2.7;
  c.le("M_ch(kappa2) / (kappa2^1.5 M_ch(1)) - 1", rel(lane_emden_mass(k2), std::pow(k2, 1.5) * lane_emden_mass(1.0)),
       1e-12);
}

void goursat(CriterionResult& r) {
  Checks c(r);
  for (const auto& lp : {poly(1.4), white_dwarf()}) {
    const PressureLaw law(lp);
    GoursatOptions o;
    o.N = 512;
    const auto d = goursat_diagnostics(law, o);
    const std::string tag = std::string(kind_name(law.kind())) + " ";
    c.lt(tag + "fitted Picard ratio", d.fitted_ratio, 1.0);
    c.le(tag + "boundary data error", d.boundary_error, 10 * o.tol);
    c.ge(tag + "interior residual order", d.residual_order, 1.0);
    c.lt(tag + "residual finest/coarsest", d.residual.back() / d.residual.front(), 1.0);
    c.lt(tag + "bound-fit max relative change", d.fit_max_change, 1.0);
    c.le(tag + "exterior dissipation identity", d.exterior_dissipation, 1e-12);
  }
}

void kernel(CriterionResult& r) {
  Checks c(r);
  for (double g : {2.0, 1.4}) {
    const PressureLaw law(poly(g));
    KernelOptions o;
    o.N = 1024;
    o.rho_max = 1.0;
    const auto grid = solve_kernel(law, o);
    const auto orc = kernel_vs_closed_form(grid, law);
    const std::string tag = "gamma=" + g6(g) + " ";
    c.le(tag + "chi sup-norm rel", orc.chi_rel, 1e-3);
    c.le(tag + "sigma - u chi sup-norm rel", orc.h_rel, 1e-3);
    c.le(tag + "support leakage", orc.support, 1e-8);
    c.le(tag + "|int chi dv / rho - 1| at 1e-6", std::fabs(kernel_mass(grid, law, 1e-6) / 1e-6 - 1), 0.01);
  }
  const PressureLaw w(white_dwarf());
  KernelOptions o;
  o.N = 512;
  const auto grid = solve_kernel(w, o);
  c.le("white_dwarf |int chi dv / rho - 1| at 1e-6", std::fabs(kernel_mass(grid, w, 1e-6) / 1e-6 - 1), 0.01);
}

SolverSpec solver_default(int N) {
  SolverSpec s;
  s.N = N;
  s.T = 1.0;
  return s;
}

void solver_conservation(CriterionResult& r) {
  Checks c(r);
  const PressureLaw law(poly(2.0));
  OutputPolicy out;
  std::vector<double> residuals;
  RunResult fine;
  double fine_seconds = 0;
  for (int N : {1024, 2048, 4096}) {
    const auto t0 = Clock::now();
    auto res = run(solver_default(N), law, out);
    const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    c.yes("N=" + std::to_string(N) + " run completed", !res.failed);
    residuals.push_back(res.max_residual);
    if (N == 4096) {
      fine = std::move(res);
      fine_seconds = sec;
    }
  }
  c.le("N=4096 energy residual / E0", residuals[2], 1e-3);
  c.lt("residual N=2048 / N=1024", residuals[1] / residuals[0], 1.0);
  c.lt("residual N=4096 / N=2048", residuals[2] / residuals[1], 1.0);
  c.eq("N=4096 boundary-cell density increases", double(fine.boundary_increases), 0.0);
  c.ge("N=4096 min boundary density / lower bound - 1", fine.min_lower_margin, 0.0);
  c.le("N=4096 max Sobolev ratio", fine.max_sobolev, 1.01);
  c.le("N=4096 run seconds", fine_seconds, 300.0);

  // mass over 10^4 steps
  auto s = build_initial_data(solver_default(1024), law).state;
  const double M = s.mass();
  double drift = 0;
  for (int n = 0; n < 10000; ++n) {
    step(s, std::min(1e-3, stable_dt(s, law, 0.4)), law, 0.4);
    drift = std::max(drift, std::fabs(s.mass() - M) / M);
  }
  c.le("mass drift over 1e4 steps", drift, 64 * std::numeric_limits<double>::epsilon());
  c.le("N=4096 mass drift", fine.max_mass_drift, 64 * std::numeric_limits<double>::epsilon());
}

void uniform_estimates(CriterionResult& r) {
  Checks c(r);
  const PressureLaw law(poly(1.4));
  SolverSpec s = solver_default(2048);
  const auto t0 = Clock::now();
  const auto sw = epsilon_sweep(s, law, {0.1, 0.05, 0.025, 0.0125}, Window{});
  const double sec = std::chrono::duration<double>(Clock::now() - t0).count();
  c.yes("all runs completed", !sw.partial);
  static const char* names[] = {"energy", "bd", "u3", "rho_g2", "bd_full"};
  for (int k = 0; k < 5; ++k) c.le(std::string("bound ") + names[k] + " growth over eps", sw.growth[k], 2.0);
  for (std::size_t k = 0; k + 1 < sw.consecutive.size(); ++k)
    c.le("window L1 difference ratio " + std::to_string(k + 1) + "/" + std::to_string(k),
         sw.consecutive[k + 1] / sw.consecutive[k], 1.1);
  c.le("sweep seconds", sec, 1800.0);
  char buf[256];
  std::snprintf(buf, sizeof buf, "max/min over eps: energy %.3g bd %.3g u3 %.3g rho_g2 %.3g bd_full %.3g",
                sw.spread[0], sw.spread[1], sw.spread[2], sw.spread[3], sw.spread[4]);
  r.note = buf;
}

void determinism(CriterionResult& r) {
  Checks c(r);
  RunConfig cfg;
  cfg.solver.N = 256;
  cfg.solver.T = 0.1;
  cfg.sweep_eps = {0.1, 0.05};
  auto produce = [&] {
    const PressureLaw law(cfg.law);
    std::string all = dump_json(to_json(cfg));
    const auto res = run(cfg.solver, law, cfg.output);
    all += ledger_csv(res) + dump_json(run_summary(res));
    for (const auto& s : res.snapshots) all += snapshot_csv(s, law);
    SolverSpec sp = cfg.solver;
    sp.N = 128;
    all += dump_json(sweep_report(epsilon_sweep(sp, law, cfg.sweep_eps, cfg.window, cfg.output)));
    all += dump_json(eos_report(cfg)) + dump_json(critical_mass_report([&] {
             RunConfig k = cfg;
             k.law = poly(1.3);
             return k;
           }()));
    return all;
  };
  const std::string a = produce(), b = produce();
  c.yes("identical bytes across two runs (" + std::to_string(a.size()) + " bytes)", a == b);
}

struct Entry {
  int id;
  const char* name;
  double budget;
  std::function<void(CriterionResult&)> fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {1, "eos closed forms", 1, eos_closed_forms},
      {2, "d(rho) law", 1, d_law},
      {3, "critical mass", 30, critical_masses},
      {4, "goursat entropy", 120, goursat},
      {5, "kernel oracle", 120, kernel},
      {6, "solver conservation", 900, solver_conservation},
      {7, "uniform-estimate probes", 1800, uniform_estimates},
      {8, "determinism", 120, determinism},
  };
  return e;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (const auto& e : entries()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), e.id) == ids.end()) continue;
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.budget = e.budget;
    const auto t0 = Clock::now();
    try {
      e.fn(r);
    } catch (const std::exception& ex) {
      r.error = ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.checks.push_back({"seconds", r.seconds, r.budget, "<=", r.seconds <= r.budget});
    r.pass = r.error.empty() && !r.checks.empty();
    for (const auto& c : r.checks) r.pass = r.pass && c.pass;
    out.push_back(std::move(r));
  }
  return out;
}

std::string acceptance_table(const std::vector<CriterionResult>& rs, bool verbose) {
  std::string out;
  char buf[512];
  for (const auto& r : rs) {
    int failed = 0;
    for (const auto& c : r.checks) failed += !c.pass;
    std::snprintf(buf, sizeof buf, "%s  %d  %-26s %3zu checks, %d failed, %.1f s\n", r.pass ? "PASS" : "FAIL", r.id,
                  r.name.c_str(), r.checks.size(), failed, r.seconds);
    out += buf;
    if (!r.error.empty()) out += "      error: " + r.error + "\n";
    for (const auto& c : r.checks) {
      if (!verbose && c.pass) continue;
      std::snprintf(buf, sizeof buf, "      %s %s: %.6g %s %.6g\n", c.pass ? "ok  " : "FAIL", c.what.c_str(), c.value,
                    c.op.c_str(), c.limit);
      out += buf;
    }
    if (verbose && !r.note.empty()) out += "      " + r.note + "\n";
  }
  return out;
}

json acceptance_json(const std::vector<CriterionResult>& rs) {
  json arr = json::array();
  for (const auto& r : rs) {
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"what", c.what}, {"value", c.value}, {"op", c.op}, {"limit", c.limit}, {"pass", c.pass}});
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"seconds", r.seconds},
                   {"budget_seconds", r.budget},
                   {"checks", checks},
                   {"note", r.note},
                   {"error", r.error}});
  }
  return arr;
}

}  // namespace sg
