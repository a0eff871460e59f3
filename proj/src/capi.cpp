// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "selfgrav.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <sstream>

#include "acceptance.hpp"
#include "reports.hpp"

struct sg_config {
  sg::json doc;        // as written plus overrides
  sg::RunConfig cfg;   // parsed view of doc
};

struct sg_law {
  sg::PressureLaw law;
};

struct sg_run {
  sg::json config;
  sg::RunConfig cfg;
  sg::PressureLaw law;
  sg::RunResult result;
};

namespace {

thread_local std::string g_error;

sg_status fail(sg_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <class F>
sg_status guard(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const sg::ConfigError& e) {
    return fail(SG_ERR_CONFIG, e.what());
  } catch (const sg::NotApplicable& e) {
    return fail(SG_ERR_CONFIG, e.what());
  } catch (const sg::DomainError& e) {
    return fail(SG_ERR_CONFIG, e.what());
  } catch (const sg::NumericalError& e) {
    return fail(SG_ERR_NUMERICAL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(SG_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SG_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

#define SG_REQUIRE(p) \
  if (!(p)) return fail(SG_ERR_ARGUMENT, #p " is null")

sg_status make_config(sg::json doc, sg_config** out) {
  auto* c = new sg_config{std::move(doc), {}};
  try {
    c->cfg = sg::parse_config(c->doc);
  } catch (...) {
    delete c;
    throw;
  }
  *out = c;
  return SG_OK;
}

}  // namespace

extern "C" {

const char* sg_version(void) { return "0.1.0"; }
const char* sg_last_error(void) { return g_error.c_str(); }
void sg_string_free(char* s) { std::free(s); }

sg_status sg_config_new(sg_config** out) {
  SG_REQUIRE(out);
  return guard([&] { return make_config(sg::json::object(), out); });
}

sg_status sg_config_load(const char* path, sg_config** out) {
  SG_REQUIRE(path);
  SG_REQUIRE(out);
  return guard([&] { return make_config(sg::read_json_file(path), out); });
}

sg_status sg_config_parse(const char* json_text, sg_config** out) {
  SG_REQUIRE(json_text);
  SG_REQUIRE(out);
  return guard([&] {
    sg::json doc;
    try {
      doc = sg::json::parse(json_text);
    } catch (const sg::json::parse_error& e) {
      throw sg::ConfigError(std::string("config: ") + e.what());
    }
    return make_config(std::move(doc), out);
  });
}

sg_status sg_config_set(sg_config* cfg, const char* key, const char* value) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(key);
  SG_REQUIRE(value);
  return guard([&] {
    sg::json doc = cfg->doc;
    sg::apply_override(doc, std::string(key) + "=" + value);
    cfg->cfg = sg::parse_config(doc);
    cfg->doc = std::move(doc);
    return SG_OK;
  });
}

sg_status sg_config_to_json(const sg_config* cfg, char** out) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(out);
  return guard([&] {
    *out = dup(sg::dump_json(sg::to_json(cfg->cfg)));
    return SG_OK;
  });
}

sg_status sg_config_check_solver(const sg_config* cfg) {
  SG_REQUIRE(cfg);
  return guard([&] {
    sg::validate_for_solver(cfg->cfg);
    return SG_OK;
  });
}

void sg_config_free(sg_config* cfg) { delete cfg; }

sg_status sg_law_new(const char* json_text, sg_law** out) {
  SG_REQUIRE(json_text);
  SG_REQUIRE(out);
  return guard([&] {
    sg::json j;
    try {
      j = sg::json::parse(json_text);
    } catch (const sg::json::parse_error& e) {
      throw sg::ConfigError(std::string("law: ") + e.what());
    }
    *out = new sg_law{sg::PressureLaw(sg::parse_law(j))};
    return SG_OK;
  });
}

sg_status sg_law_from_config(const sg_config* cfg, sg_law** out) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(out);
  return guard([&] {
    *out = new sg_law{sg::PressureLaw(cfg->cfg.law)};
    return SG_OK;
  });
}

sg_status sg_law_eval(const sg_law* law, double rho, sg_law_values* out) {
  SG_REQUIRE(law);
  SG_REQUIRE(out);
  return guard([&] {
    const auto& L = law->law;
    *out = {L.P(rho), L.dP(rho), L.d2P(rho), L.sound_speed(rho), L.e(rho), L.k(rho), L.d(rho), L.h(rho)};
    return SG_OK;
  });
}

void sg_law_free(sg_law* law) { delete law; }

sg_status sg_eos_report(const sg_config* cfg, char** json) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(json);
  return guard([&] {
    *json = dup(sg::dump_json(sg::eos_report(cfg->cfg)));
    return SG_OK;
  });
}

sg_status sg_critical_mass(const sg_config* cfg, char** json) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(json);
  return guard([&] {
    *json = dup(sg::dump_json(sg::critical_mass_report(cfg->cfg)));
    return SG_OK;
  });
}

sg_status sg_entropy_special(const sg_config* cfg, char** json, char** dump_csv) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(json);
  return guard([&] {
    std::string dump;
    const auto j = sg::special_entropy_report(cfg->cfg, dump_csv ? &dump : nullptr);
    *json = dup(sg::dump_json(j));
    if (dump_csv) *dump_csv = dup(dump);
    return SG_OK;
  });
}

sg_status sg_entropy_kernel(const sg_config* cfg, char** json, char** dump_csv) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(json);
  return guard([&] {
    std::string dump;
    const auto j = sg::kernel_report(cfg->cfg, dump_csv ? &dump : nullptr);
    *json = dup(sg::dump_json(j));
    if (dump_csv) *dump_csv = dup(dump);
    return SG_OK;
  });
}

sg_status sg_run_new(const sg_config* cfg, sg_run** out) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(out);
  return guard([&] {
    sg::validate_for_solver(cfg->cfg);
    auto* r = new sg_run{sg::to_json(cfg->cfg), cfg->cfg, sg::PressureLaw(cfg->cfg.law), {}};
    try {
      r->result = sg::run(r->cfg.solver, r->law, r->cfg.output);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return SG_OK;
  });
}

sg_status sg_run_status(const sg_run* run) {
  SG_REQUIRE(run);
  if (run->result.failed) return fail(SG_ERR_NUMERICAL, run->result.failure);
  return SG_OK;
}

sg_status sg_run_ledger_csv(const sg_run* run, char** csv) {
  SG_REQUIRE(run);
  SG_REQUIRE(csv);
  return guard([&] {
    *csv = dup(sg::ledger_csv(run->result));
    return SG_OK;
  });
}

int sg_run_snapshot_count(const sg_run* run) { return run ? int(run->result.snapshots.size()) : 0; }

sg_status sg_run_snapshot_csv(const sg_run* run, int index, char** csv) {
  SG_REQUIRE(run);
  SG_REQUIRE(csv);
  if (index < 0 || index >= int(run->result.snapshots.size())) return fail(SG_ERR_ARGUMENT, "snapshot index out of range");
  return guard([&] {
    *csv = dup(sg::snapshot_csv(run->result.snapshots[index], run->law));
    return SG_OK;
  });
}

sg_status sg_run_summary(const sg_run* run, char** json) {
  SG_REQUIRE(run);
  SG_REQUIRE(json);
  return guard([&] {
    *json = dup(sg::dump_json(sg::run_summary(run->result)));
    return SG_OK;
  });
}

sg_status sg_run_write(const sg_run* run, const char* dir) {
  SG_REQUIRE(run);
  SG_REQUIRE(dir);
  return guard([&] {
    try {
      sg::write_run(dir, run->config, run->result, run->law);
    } catch (const sg::ConfigError& e) {
      return fail(SG_ERR_IO, e.what());
    }
    return SG_OK;
  });
}

void sg_run_free(sg_run* run) { delete run; }

sg_status sg_sweep(const sg_config* cfg, const char* axis, char** json) {
  SG_REQUIRE(cfg);
  SG_REQUIRE(axis);
  SG_REQUIRE(json);
  return guard([&] {
    const auto& c = cfg->cfg;
    sg::validate_for_solver(c);
    const sg::PressureLaw law(c.law);
    sg::SweepResult s;
    const std::string ax = axis;
    if (ax == "eps")
      s = sg::epsilon_sweep(c.solver, law, c.sweep_eps, c.window, c.output);
    else if (ax == "b")
      s = sg::domain_sweep(c.solver, law, c.sweep_b, c.window, c.output);
    else
      throw sg::ConfigError("sweep axis must be eps or b");
    sg::json j;
    j["config"] = sg::to_json(c);
    const sg::json rep = sg::sweep_report(s);
    for (const auto& [k, v] : rep.items()) j[k] = v;
    *json = dup(sg::dump_json(j));
    if (s.partial) return fail(SG_ERR_NUMERICAL, "sweep: at least one run failed");
    return SG_OK;
  });
}

sg_status sg_check(const char* criteria, int verbose, char** table, char** json) {
  return guard([&] {
    std::vector<int> ids;
    if (criteria && *criteria) {
      std::stringstream ss(criteria);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const long id = std::strtol(tok.c_str(), &end, 10);
        if (tok.empty() || *end || id < 1 || id > 8) throw sg::ConfigError("check: criteria are ids 1-8, got '" + tok + "'");
        ids.push_back(int(id));
      }
    }
    const auto res = sg::run_acceptance(ids);
    if (table) *table = dup(sg::acceptance_table(res, verbose != 0));
    if (json) *json = dup(sg::dump_json(sg::acceptance_json(res)));
    for (const auto& r : res)
      if (!r.pass) return fail(SG_ERR_CHECK, "acceptance: criterion " + std::to_string(r.id) + " failed");
    return SG_OK;
  });
}

sg_status sg_write_file(const char* path, const char* text) {
  SG_REQUIRE(path);
  SG_REQUIRE(text);
  return guard([&] {
    try {
      sg::write_text(path, text);
    } catch (const sg::ConfigError& e) {
      return fail(SG_ERR_IO, e.what());
    }
    return SG_OK;
  });
}

}  // extern "C"
