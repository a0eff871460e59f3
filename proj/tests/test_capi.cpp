// SPDX-License-Identifier: MIT
#include <cstring>
#include <string>

#include "doctest.h"
#include "selfgrav.h"

namespace {

struct Str {
  char* p = nullptr;
  ~Str() { sg_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

}  // namespace

TEST_CASE("config handle") {
  sg_config* cfg = nullptr;
  REQUIRE(sg_config_new(&cfg) == SG_OK);
  CHECK(sg_config_set(cfg, "solver.N", "64") == SG_OK);
  CHECK(sg_config_set(cfg, "solver.eps", "0") == SG_ERR_CONFIG);
  CHECK(std::string(sg_last_error()).find("solver.eps") == 0);
  CHECK(sg_config_set(cfg, "solver.bogus", "1") == SG_ERR_CONFIG);
  Str j;
  REQUIRE(sg_config_to_json(cfg, &j.p) == SG_OK);
  CHECK(j.str().find("\"N\": 64") != std::string::npos);  // failed sets left the config alone
  CHECK(j.str().find("bogus") == std::string::npos);
  CHECK(sg_config_check_solver(cfg) == SG_OK);
  sg_config_free(cfg);

  CHECK(sg_config_parse("{\"law\": {\"gamma\": 4}}", &cfg) == SG_ERR_CONFIG);
  CHECK(sg_config_parse("{not json", &cfg) == SG_ERR_CONFIG);
  CHECK(sg_config_load("/nonexistent.json", &cfg) == SG_ERR_CONFIG);
  CHECK(sg_config_new(nullptr) == SG_ERR_ARGUMENT);
  CHECK(sg_config_set(nullptr, "a", "b") == SG_ERR_ARGUMENT);
  CHECK(std::strlen(sg_version()) > 0);
}

TEST_CASE("law handle") {
  sg_law* law = nullptr;
  REQUIRE(sg_law_new("{\"kind\":\"polytropic\",\"kappa\":1,\"gamma\":2}", &law) == SG_OK);
  sg_law_values v;
  REQUIRE(sg_law_eval(law, 2.0, &v) == SG_OK);
  CHECK(v.P == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(v.dP == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(v.e == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(v.d == 1.5);
  sg_law_free(law);
  CHECK(sg_law_new("{\"kind\":\"white_dwarf\",\"kappa\":1}", &law) == SG_ERR_CONFIG);
}

TEST_CASE("reports through the C interface") {
  sg_config* cfg = nullptr;
  REQUIRE(sg_config_parse("{\"law\": {\"gamma\": 1.3}, \"goursat\": {\"N\": 64}, \"kernel\": {\"N\": 64}}", &cfg) == SG_OK);
  Str a, b, c, d, e;
  CHECK(sg_eos_report(cfg, &a.p) == SG_OK);
  CHECK(a.str().find("\"derived\"") != std::string::npos);
  CHECK(sg_critical_mass(cfg, &b.p) == SG_OK);
  CHECK(b.str().find("\"M_c\"") != std::string::npos);
  CHECK(sg_entropy_special(cfg, &c.p, nullptr) == SG_OK);
  CHECK(sg_entropy_kernel(cfg, &d.p, &e.p) == SG_OK);
  CHECK(e.str().rfind("rho,v,chi,sigma_minus_u_chi\n", 0) == 0);
  CHECK(sg_config_set(cfg, "law.gamma", "2") == SG_OK);
  Str f;
  CHECK(sg_critical_mass(cfg, &f.p) == SG_ERR_CONFIG);
  sg_config_free(cfg);
}

TEST_CASE("run handle") {
  sg_config* cfg = nullptr;
  REQUIRE(sg_config_parse("{\"solver\": {\"N\": 64, \"T\": 0.05}, \"output\": {\"snapshots\": 2}}", &cfg) == SG_OK);
  sg_run* run = nullptr;
  REQUIRE(sg_run_new(cfg, &run) == SG_OK);
  CHECK(sg_run_status(run) == SG_OK);
  CHECK(sg_run_snapshot_count(run) == 3);
  Str led, snap, sum;
  CHECK(sg_run_ledger_csv(run, &led.p) == SG_OK);
  CHECK(led.str().rfind("tau,mass,E_total,", 0) == 0);
  CHECK(sg_run_snapshot_csv(run, 2, &snap.p) == SG_OK);
  CHECK(snap.str().rfind("tau,j,x,r,rho,u,P,Phi_r\n", 0) == 0);
  CHECK(sg_run_snapshot_csv(run, 3, &snap.p) == SG_ERR_ARGUMENT);
  CHECK(sg_run_summary(run, &sum.p) == SG_OK);
  sg_run_free(run);

  CHECK(sg_config_set(cfg, "solver.max_steps", "3") == SG_OK);
  REQUIRE(sg_run_new(cfg, &run) == SG_OK);
  CHECK(sg_run_status(run) == SG_ERR_NUMERICAL);
  sg_run_free(run);

  CHECK(sg_config_set(cfg, "law.gamma", "1.1") == SG_OK);
  CHECK(sg_run_new(cfg, &run) == SG_ERR_CONFIG);
  sg_config_free(cfg);
}

TEST_CASE("sweep and check") {
  sg_config* cfg = nullptr;
  REQUIRE(sg_config_parse("{\"solver\": {\"N\": 64, \"T\": 0.05}, \"sweep\": {\"eps\": [0.1, 0.05]}}", &cfg) == SG_OK);
  Str s, bad;
  CHECK(sg_sweep(cfg, "eps", &s.p) == SG_OK);
  CHECK(s.str().find("\"consecutive\"") != std::string::npos);
  CHECK(sg_sweep(cfg, "T", &bad.p) == SG_ERR_CONFIG);
  sg_config_free(cfg);

  Str table, json;
  CHECK(sg_check("1,2", 0, &table.p, &json.p) == SG_OK);
  CHECK(table.str().rfind("PASS  1", 0) == 0);
  Str t2;
  CHECK(sg_check("9", 0, &t2.p, nullptr) == SG_ERR_CONFIG);
}
