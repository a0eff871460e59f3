// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "reports.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sg {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// log-spaced densities, both ends included
std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const int n = std::max(1, int(std::ceil(per_decade * std::log10(hi / lo))));
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / n);
  return g;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json eos_report(const RunConfig& c) {
  const PressureLaw law(c.law);
  json j;
  j["config"] = to_json(c);
  j["law"] = law_to_json(law.params());
  j["derived"] = {{"gamma1", law.gamma1()}, {"gamma2", law.gamma2()}, {"kappa1", law.kappa1()},
                  {"kappa2", law.kappa2()}, {"rho_lo", law.rho_lo()}, {"rho_hi", law.rho_hi()},
                  {"eps", law.eps()},       {"theta1", law.theta1()}, {"theta2", law.theta2()},
                  {"lambda1", law.lambda1()}, {"nu", law.nu()},     {"a0", law.a0()}};
  const double lo = c.eos_rho_min, hi = c.eos_rho_max;
  j["tail_ratios"] = {{"rho_low", lo},
                      {"P_over_kappa1_rho_gamma1", law.P(lo) / (law.kappa1() * std::pow(lo, law.gamma1()))},
                      {"rho_high", hi},
                      {"P_over_kappa2_rho_gamma2", law.P(hi) / (law.kappa2() * std::pow(hi, law.gamma2()))}};

  const auto rep = verify_asymptotic_bounds(law, default_tail_grid(law));
  json viol = json::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"quantity", v.quantity}, {"rho", v.rho}, {"ratio", v.ratio}, {"lower", v.lower}, {"upper", v.upper}});
  j["asymptotic_bounds"] = {{"pass", rep.pass},
                            {"worst_margin", rep.worst_margin},
                            {"C_e", rep.C_e},
                            {"C_de", rep.C_de},
                            {"C_k", rep.C_k},
                            {"C_dk", rep.C_dk},
                            {"C_d2k", rep.C_d2k},
                            {"max_rho_k2_over_k1_low", rep.max_rho_k2_over_k1_low},
                            {"max_rho_k2_over_k1_high", rep.max_rho_k2_over_k1_high},
                            {"nu", rep.nu},
                            {"nu_high", rep.nu_high},
                            {"violations", viol}};

  // d(rho) against its high-density limit 1 + theta2, scaled by rho^(2/3), per decade above rho^*
  if (law.kind() == LawKind::WhiteDwarf) {
    json fits = json::array();
    const double dlim = 1 + law.theta2();
    for (int dec = 0; dec < 3; ++dec) {
      const double a = law.rho_hi() * std::pow(10.0, dec);
      double C = 0;
      for (double rho : log_grid(a, 10 * a, 20)) C = std::max(C, std::fabs(law.d(rho) - dlim) * std::cbrt(rho * rho));
      fits.push_back({{"rho_from", a}, {"rho_to", 10 * a}, {"C", C}});
    }
    j["d_high_fit"] = fits;
  }

  json table = json::array();
  for (double rho : log_grid(lo, hi, c.eos_per_decade))
    table.push_back({{"rho", rho},
                     {"P", law.P(rho)},
                     {"dP", law.dP(rho)},
                     {"d2P", law.d2P(rho)},
                     {"c", law.sound_speed(rho)},
                     {"e", law.e(rho)},
                     {"k", law.k(rho)},
                     {"d", law.d(rho)},
                     {"h", law.h(rho)}});
  j["table"] = table;
  return j;
}

json critical_mass_report(const RunConfig& c) {
  const PressureLaw law(c.law);
  const auto r = critical_mass(law, c.E0);
  json j;
  j["config"] = to_json(c);
  j["E0"] = r.E0;
  j["chandrasekhar"] = r.chandrasekhar;
  j["M_c"] = r.M_c;
  j["beta_argmax"] = r.beta_argmax;
  j["M_ch"] = r.M_ch;
  j["M_tilde"] = r.M_tilde;
  j["M_tilde_literal"] = r.M_tilde_literal;
  j["margin"] = r.M_tilde > 0 ? (r.M_tilde - r.M_c) / r.M_tilde : 0.0;
  j["max_residual_rel"] = r.max_residual_rel;
  j["max_residual_spec"] = r.max_residual_spec;
  j["argmax_at_grid_edge"] = r.argmax_at_grid_edge;
  j["h_increasing"] = r.h.increasing;
  j["h_first_violation"] = r.h.first_violation;
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"beta", s.beta},
                       {"cmax", s.cmax},
                       {"B", s.B},
                       {"M", s.M},
                       {"residual", s.residual},
                       {"residual_rel", s.residual_rel},
                       {"residual_spec", s.residual_spec},
                       {"cmax_at_boundary", s.cmax_at_boundary}});
  j["samples"] = samples;
  return j;
}

json special_entropy_report(const RunConfig& c, std::string* dump) {
  const PressureLaw law(c.law);
  const auto d = goursat_diagnostics(law, c.goursat);
  auto fit = [](const GoursatBoundFits& f) {
    return json{{"C_eta", f.C_eta},       {"C_eta_rho", f.C_eta_rho}, {"C_eta_u", f.C_eta_u},
                {"C_eta_m", f.C_eta_m},   {"C_eta_mu", f.C_eta_mu},   {"C_eta_mrho", f.C_eta_mrho},
                {"C_q", f.C_q},           {"C_q_ueta", f.C_q_ueta}};
  };
  json j;
  j["config"] = to_json(c);
  j["N"] = d.N;
  j["iterations"] = d.iterations;
  j["explicit_levels"] = d.explicit_levels;
  j["fitted_ratio"] = d.fitted_ratio;
  j["theta_ratio_predicted"] = d.theta_ratio_predicted;
  j["last_delta"] = d.last_delta;
  j["boundary_error"] = d.boundary_error;
  j["cross_route_error"] = d.cross_route_error;
  j["c1_mismatch"] = d.c1_mismatch;
  j["oddness_error"] = d.oddness_error;
  j["exterior_dissipation"] = d.exterior_dissipation;
  j["exterior_q_min_margin"] = d.exterior_q_min_margin;
  j["refinement"] = {{"N", d.res_N},
                     {"residual", d.residual},
                     {"flux_residual", d.flux_residual},
                     {"cross_route", d.cross_route},
                     {"residual_order", d.residual_order},
                     {"flux_order", d.flux_order},
                     {"cross_route_order", d.cross_route_order}};
  j["bound_fits"] = {{"coarse", fit(d.fit_coarse)}, {"fine", fit(d.fit_fine)}, {"max_change", d.fit_max_change}};

  if (dump) {
    const GoursatField f = solve_goursat(law, c.goursat);
    const double kmax = f.kappa_max;
    std::string out = "rho,u,eta,eta_rho,eta_u,q\n";
    for (int i = 1; i <= c.dump_rho; ++i) {
      const double rho = law.k_inverse(kmax * i / c.dump_rho);
      const double k = law.k(rho);
      for (int l = 0; l < c.dump_u; ++l) {
        const double u = c.dump_u == 1 ? 0.0 : -2 * k + 4 * k * l / (c.dump_u - 1);
        const auto v = special_entropy(f, law, rho, u);
        const double q = special_flux(f, law, rho, u);
        out += fmt17(rho) + "," + fmt17(u) + "," + fmt17(v.eta) + "," + fmt17(v.eta_rho) + "," + fmt17(v.eta_u) +
               "," + fmt17(q) + "\n";
      }
    }
    *dump = std::move(out);
  }
  return j;
}

json kernel_report(const RunConfig& c, std::string* dump) {
  const PressureLaw law(c.law);
  const KernelGrid g = solve_kernel(law, c.kernel);
  const KernelCoefficients coef(law);
  json j;
  j["config"] = to_json(c);
  j["N"] = g.N;
  j["rho_max"] = g.rho_max;
  j["sweeps"] = g.sweeps;
  j["changes"] = g.changes;
  double defect = 0;
  for (double m : g.mass_defect) defect = std::max(defect, std::fabs(m));
  j["max_mass_defect"] = defect;
  j["lambda"] = coef.lambda();
  j["M_lambda"] = coef.M();
  j["normalization"] = coef.norm();
  const double rho_small = 1e-6;
  j["mass_ratio_small_rho"] = {{"rho", rho_small}, {"ratio", kernel_mass(g, law, rho_small) / rho_small}};
  if (law.kind() == LawKind::Polytropic) {
    const auto o = kernel_vs_closed_form(g, law);
    j["closed_form"] = {{"chi_rel", o.chi_rel}, {"h_rel", o.h_rel}, {"boundary_rel", o.boundary_rel}, {"support", o.support}};
  }
  const auto psi = bump(0.0, 1.0);
  const double lo = std::min(1e-4, 1e-2 * g.rho_max), hi = 0.5 * g.rho_max;
  const auto fits = kernel_growth_fits(g, law, psi, lo, hi);
  j["growth_fits"] = {{"rho_lo", lo}, {"rho_hi", hi}, {"C_chi", number_or_null(fits.C_chi)},
                      {"C_h", number_or_null(fits.C_h)}, {"C_eta", number_or_null(fits.C_eta)},
                      {"C_q", number_or_null(fits.C_q)}};

  if (dump) {
    std::string out = "rho,v,chi,sigma_minus_u_chi\n";
    const double kmax = law.k(g.rho_max);
    for (int i = 1; i <= c.dump_rho; ++i) {
      const double rho = law.k_inverse(kmax * i / c.dump_rho);
      const double k = law.k(rho);
      for (int l = 0; l < c.dump_u; ++l) {
        const double v = c.dump_u == 1 ? 0.0 : -k + 2 * k * l / (c.dump_u - 1);
        out += fmt17(rho) + "," + fmt17(v) + "," + fmt17(kernel_chi(g, law, rho, v)) + "," +
               fmt17(kernel_h(g, law, rho, v)) + "\n";
      }
    }
    *dump = std::move(out);
  }
  return j;
}

std::string ledger_csv(const RunResult& r) {
  std::string out =
      "tau,mass,E_total,E_kinetic,E_internal,E_grav,BD_functional,rho_boundary,b_of_t,dt,acc_rhoP,acc_u3,"
      "acc_rho_g2,E_total_plus,dissipation,residual,residual_scheme,sobolev,rho_lower,bound_energy,bound_bd,"
      "bound_energy_plain\n";
  for (const auto& x : r.ledger) {
    const double v[] = {x.tau,        x.mass,       x.E_total,      x.E_kinetic,    x.E_internal,   x.E_grav,
                        x.BD,         x.rho_boundary, x.b,          x.dt,           x.acc_rhoP,     x.acc_u3,
                        x.acc_rho_g2, x.E_total_plus, x.dissipation, x.residual,    x.residual_scheme,
                        x.sobolev,    x.rho_lower,  x.bound_energy, x.bound_bd,     x.bound_energy_plain};
    bool first = true;
    for (double y : v) {
      if (!first) out += ',';
      out += fmt17(y);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string snapshot_csv(const Snapshot& snap, const PressureLaw& law) {
  const auto& s = snap.state;
  std::string out = "tau,j,x,r,rho,u,P,Phi_r\n";
  for (int j = 0; j < s.N; ++j) {
    const double x = (j + 0.5) * s.dx, r = s.center(j);
    const double u = 0.5 * (s.u[j] + s.u[j + 1]);
    out += fmt17(snap.tau) + "," + std::to_string(j) + "," + fmt17(x) + "," + fmt17(r) + "," + fmt17(s.rho[j]) + "," +
           fmt17(u) + "," + fmt17(law.P(s.rho[j])) + "," + fmt17(x / (r * r)) + "\n";
  }
  return out;
}

json run_summary(const RunResult& r) {
  const auto& id = r.init;
  json j;
  j["initial"] = {{"profile", profile_name(id.profile)},
                  {"E0", id.E0},
                  {"E1", id.E1},
                  {"E0_discrete", id.E0_discrete},
                  {"rho_b", id.rho_b},
                  {"alpha", id.alpha},
                  {"amplitude", id.amplitude},
                  {"shell_p", id.shell_p},
                  {"floor_delta", id.floor_delta}};
  j["steps"] = r.steps;
  j["rejections"] = r.rejections;
  j["failed"] = r.failed;
  j["failure"] = r.failure;
  j["failure_cell"] = r.failure_cell;
  j["tau_final"] = r.ledger.empty() ? 0.0 : r.ledger.back().tau;
  j["b_final"] = r.ledger.empty() ? 0.0 : r.ledger.back().b;
  j["b_from_velocity"] = r.b_from_velocity;
  j["max_mass_drift"] = r.max_mass_drift;
  j["max_residual"] = r.max_residual;
  j["max_residual_scheme"] = r.max_residual_scheme;
  j["min_b_ratio"] = r.min_b_ratio;
  j["min_lower_margin"] = r.min_lower_margin;
  j["boundary_increases"] = r.boundary_increases;
  j["max_sobolev"] = r.max_sobolev;
  j["C_tilde"] = r.C_tilde;
  j["bounds"] = {{"energy", r.bound_energy},   {"bd", r.bound_bd},           {"u3", r.bound_u3},
                 {"rho_g2", r.bound_rho_g2},   {"bd_full", r.bound_bd_full}, {"rhoP", r.bound_rhoP},
                 {"energy_plain", r.bound_energy_plain}};
  json taus = json::array();
  for (const auto& s : r.snapshots) taus.push_back(s.tau);
  j["snapshot_times"] = taus;
  return j;
}

json sweep_report(const SweepResult& s) {
  static const char* names[] = {"energy", "bd", "u3", "rho_g2", "bd_full", "rhoP"};
  json j;
  j["axis"] = s.axis;
  json params = json::array(), runs = json::array();
  for (const auto& r : s.runs) {
    params.push_back(r.param);
    runs.push_back({{"param", r.param},
                    {"failed", r.failed},
                    {"failure", r.failure},
                    {"final_b", r.final_b},
                    {"min_b", r.min_b},
                    {"max_mass_drift", r.max_mass_drift},
                    {"max_residual", r.max_residual},
                    {"bounds",
                     {{"energy", r.bound_energy},
                      {"bd", r.bound_bd},
                      {"u3", r.bound_u3},
                      {"rho_g2", r.bound_rho_g2},
                      {"bd_full", r.bound_bd_full},
                      {"rhoP", r.bound_rhoP}}}});
  }
  j["parameters"] = params;
  j["window"] = {{"d", s.d}, {"D", s.D}};
  j["runs"] = runs;
  j["diff"] = s.diff;
  j["consecutive"] = s.consecutive;
  j["monotone"] = s.monotone;
  j["monotone_note"] = "heuristic: consecutive window differences within 10% slack; not a convergence proof";
  j["rate"] = s.rate;
  json growth, spread;
  for (std::size_t k = 0; k < s.growth.size() && k < 6; ++k) {
    growth[names[k]] = s.growth[k];
    spread[names[k]] = s.spread[k];
  }
  j["growth"] = growth;
  j["spread"] = spread;
  j["partial"] = s.partial;

  json crit;
  crit["monotone_differences"] = s.monotone && !s.partial;
  if (s.axis == "eps") {
    bool ok = !s.partial;
    for (std::size_t k = 0; k < s.growth.size() && k < 5; ++k) ok = ok && s.growth[k] <= 2.0;
    crit["bounds_within_2x"] = ok;
  }
  j["criteria"] = crit;
  return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot write");
  out << text;
  if (!out) throw ConfigError(path + ": write failed");
}

void write_run(const std::string& dir, const json& config, const RunResult& r, const PressureLaw& law) {
  const fs::path d(dir);
  write_text((d / "config.json").string(), dump_json(config));
  write_text((d / "ledger.csv").string(), ledger_csv(r));
  write_text((d / "summary.json").string(), dump_json(run_summary(r)));
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    write_text((d / "snapshots" / name).string(), snapshot_csv(r.snapshots[k], law));
  }
}

}  // namespace sg
