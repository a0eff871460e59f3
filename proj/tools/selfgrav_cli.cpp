// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// selfgrav command line front end. Talks to the library only through selfgrav.h.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfgrav.h"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string law;
  std::string output;
};

struct Failure {
  sg_status status;
};

void check(sg_status s) {
  if (s != SG_OK) throw Failure{s};
}

struct Str {
  char* p = nullptr;
  ~Str() { sg_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using ConfigPtr = std::unique_ptr<sg_config, decltype(&sg_config_free)>;

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "JSON run configuration");
  cmd->add_option("--set", c.sets, "override, e.g. solver.N=2048 (repeatable)");
  cmd->add_option("--law", c.law, "law as JSON, or polytropic | white_dwarf | p_delta");
  cmd->add_option("-o,--output", c.output, "write the JSON report here instead of stdout");
}

void set(sg_config* cfg, const std::string& key, const std::string& value) { check(sg_config_set(cfg, key.c_str(), value.c_str())); }

ConfigPtr load(const Common& c) {
  sg_config* cfg = nullptr;
  check(c.config.empty() ? sg_config_new(&cfg) : sg_config_load(c.config.c_str(), &cfg));
  ConfigPtr p(cfg, sg_config_free);
  if (!c.law.empty()) set(cfg, "law", c.law.front() == '{' ? c.law : "{\"kind\":\"" + c.law + "\"}");
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "selfgrav: --set expects key=value, got '%s'\n", s.c_str());
      throw Failure{SG_ERR_CONFIG};
    }
    set(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  return p;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::fputs(text.c_str(), stdout);
  else
    check(sg_write_file(path.c_str(), text.c_str()));
}

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscous self-gravitating gas: equation of state, critical mass, entropy kernels, solver"};
  app.require_subcommand(0, 1);

  bool check_mode = false, verbose = false;
  std::string criteria, check_json;
  app.add_flag("--check", check_mode, "run the acceptance suite and print a pass/fail table");
  app.add_option("--criteria", criteria, "comma-separated criterion ids for --check");
  app.add_flag("-v,--verbose", verbose, "--check: print every check");
  app.add_option("--check-json", check_json, "--check: also write the results as JSON");

  Common eos, cm, sp, ke, sim, swe, swb;
  auto* c_eos = app.add_subcommand("eos-report", "equation-of-state constants, tail bounds and a table");
  add_common(c_eos, eos);

  auto* c_cm = app.add_subcommand("critical-mass", "critical mass scan over beta");
  add_common(c_cm, cm);
  double E0 = -1;
  c_cm->add_option("--E0", E0, "energy level");

  auto* c_ent = app.add_subcommand("entropy", "entropy pairs");
  c_ent->require_subcommand(1);
  auto* c_sp = c_ent->add_subcommand("special", "special entropy by the characteristic Goursat problem");
  add_common(c_sp, sp);
  double sp_rho_max = -1;
  int sp_N = -1;
  std::string sp_dump;
  c_sp->add_option("--rho-max", sp_rho_max, "largest density on the grid");
  c_sp->add_option("--N", sp_N, "cells per Riemann invariant");
  c_sp->add_option("--dump", sp_dump, "CSV of rho, u, eta, eta_rho, eta_u, q");

  auto* c_ke = c_ent->add_subcommand("kernel", "weak entropy kernel");
  add_common(c_ke, ke);
  double ke_rho_max = -1;
  int ke_N = -1;
  std::string ke_dump;
  c_ke->add_option("--rho-max", ke_rho_max, "largest density on the grid");
  c_ke->add_option("--N", ke_N, "levels in k");
  c_ke->add_option("--dump", ke_dump, "CSV of rho, v, chi, sigma - u chi");

  auto* c_sim = app.add_subcommand("simulate", "run the solver and write snapshots and the ledger");
  add_common(c_sim, sim);
  std::string sim_out;
  c_sim->add_option("--out", sim_out, "output directory (overrides output.dir)");

  auto* c_swe = app.add_subcommand("sweep-epsilon", "solver runs over a list of viscosities");
  add_common(c_swe, swe);
  std::vector<double> eps_list;
  std::string swe_out;
  c_swe->add_option("--eps", eps_list, "viscosities")->delimiter(',');
  c_swe->add_option("--out", swe_out, "directory for sweep.json and config.json");

  auto* c_swb = app.add_subcommand("sweep-domain", "solver runs over a list of outer radii");
  add_common(c_swb, swb);
  std::vector<double> b_list;
  std::string swb_out;
  c_swb->add_option("--b", b_list, "outer radii")->delimiter(',');
  c_swb->add_option("--out", swb_out, "directory for sweep.json and config.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return SG_ERR_CONFIG;
  }

  try {
    if (check_mode) {
      Str table, js;
      const sg_status s = sg_check(criteria.c_str(), verbose, &table.p, &js.p);
      if (s != SG_OK && s != SG_ERR_CHECK) throw Failure{s};
      std::fputs(table.str().c_str(), stdout);
      if (!check_json.empty()) check(sg_write_file(check_json.c_str(), js.str().c_str()));
      std::printf("%s\n", s == SG_OK ? "all criteria passed" : "some criteria FAILED");
      return s;
    }

    if (*c_eos) {
      auto cfg = load(eos);
      Str out;
      check(sg_eos_report(cfg.get(), &out.p));
      emit(out.str(), eos.output);
    } else if (*c_cm) {
      auto cfg = load(cm);
      if (E0 >= 0) set(cfg.get(), "critical_mass.E0", std::to_string(E0));
      Str out;
      check(sg_critical_mass(cfg.get(), &out.p));
      emit(out.str(), cm.output);
    } else if (*c_sp) {
      auto cfg = load(sp);
      if (sp_rho_max > 0) set(cfg.get(), "goursat.rho_max", std::to_string(sp_rho_max));
      if (sp_N > 0) set(cfg.get(), "goursat.N", std::to_string(sp_N));
      Str out, dump;
      check(sg_entropy_special(cfg.get(), &out.p, sp_dump.empty() ? nullptr : &dump.p));
      if (!sp_dump.empty()) check(sg_write_file(sp_dump.c_str(), dump.str().c_str()));
      emit(out.str(), sp.output);
    } else if (*c_ke) {
      auto cfg = load(ke);
      if (ke_rho_max > 0) set(cfg.get(), "kernel.rho_max", std::to_string(ke_rho_max));
      if (ke_N > 0) set(cfg.get(), "kernel.N", std::to_string(ke_N));
      Str out, dump;
      check(sg_entropy_kernel(cfg.get(), &out.p, ke_dump.empty() ? nullptr : &dump.p));
      if (!ke_dump.empty()) check(sg_write_file(ke_dump.c_str(), dump.str().c_str()));
      emit(out.str(), ke.output);
    } else if (*c_sim) {
      auto cfg = load(sim);
      if (!sim_out.empty()) set(cfg.get(), "output.dir", "\"" + sim_out + "\"");
      Str eff;
      check(sg_config_to_json(cfg.get(), &eff.p));
      check(sg_config_check_solver(cfg.get()));
      sg_run* raw = nullptr;
      check(sg_run_new(cfg.get(), &raw));
      std::unique_ptr<sg_run, decltype(&sg_run_free)> run(raw, sg_run_free);
      std::string dir = sim_out;
      if (dir.empty()) {
        // output.dir from the effective config
        const std::string key = "\"dir\": \"";
        const auto pos = eff.str().find(key);
        const auto end = eff.str().find('"', pos + key.size());
        dir = eff.str().substr(pos + key.size(), end - pos - key.size());
      }
      check(sg_run_write(run.get(), dir.c_str()));
      Str summary;
      check(sg_run_summary(run.get(), &summary.p));
      emit(summary.str(), sim.output);
      const sg_status s = sg_run_status(run.get());
      if (s != SG_OK) {
        std::fprintf(stderr, "selfgrav: %s\n", sg_last_error());
        return s;
      }
    } else if (*c_swe || *c_swb) {
      const bool eps_axis = c_swe->parsed();
      Common& com = eps_axis ? swe : swb;
      auto cfg = load(com);
      if (eps_axis && !eps_list.empty()) set(cfg.get(), "sweep.eps", join(eps_list));
      if (!eps_axis && !b_list.empty()) set(cfg.get(), "sweep.b", join(b_list));
      Str out;
      const sg_status s = sg_sweep(cfg.get(), eps_axis ? "eps" : "b", &out.p);
      if (s != SG_OK && !out.p) throw Failure{s};
      const std::string dir = eps_axis ? swe_out : swb_out;
      if (!dir.empty()) {
        Str eff;
        check(sg_config_to_json(cfg.get(), &eff.p));
        check(sg_write_file((dir + "/config.json").c_str(), eff.str().c_str()));
        check(sg_write_file((dir + "/sweep.json").c_str(), out.str().c_str()));
      }
      emit(out.str(), com.output);
      if (s != SG_OK) {
        std::fprintf(stderr, "selfgrav: %s\n", sg_last_error());
        return s;
      }
    } else {
      std::fputs(app.help().c_str(), stdout);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "selfgrav: %s\n", sg_last_error());
    return f.status;
  }
  return 0;
}
