// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sg {

namespace {

// Reads fields from one JSON object and remembers which keys were used.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  void num(const char* key, double& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + "expected a number");
    out = v.get<double>();
  }
  template <class I>
  void integer(const char* key, I& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + "expected an integer");
    out = v.get<I>();
  }
  void boolean(const char* key, bool& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + "expected true or false");
    out = v.get<bool>();
  }
  void str(const char* key, std::string& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + "expected a string");
    out = v.get<std::string>();
  }
  void list(const char* key, std::vector<double>& out) {
    if (!take(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + "expected an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where(key) + "expected an array of numbers");
      out.push_back(x.get<double>());
    }
  }
  const json* object(const char* key) {
    if (!take(key)) return nullptr;
    return &j_.at(key);
  }
  std::string where(const std::string& key) const {
    std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
    return p.empty() ? "config: " : p + ": ";
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where(k) + "unknown key");
  }

 private:
  bool take(const char* key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& field) {
  if (!(v > 0)) throw ConfigError(field + ": must be > 0");
}

Profile profile_from(const std::string& s) {
  if (s == "bump_shell") return Profile::BumpShell;
  if (s == "bump_uniform") return Profile::BumpUniform;
  if (s == "hydrostatic") return Profile::Hydrostatic;
  throw ConfigError("solver.profile: expected bump_shell, bump_uniform or hydrostatic, got '" + s + "'");
}

}  // namespace

LawParams parse_law(const json& j) {
  Reader r(j, "law");
  LawParams p;
  std::string kind = "polytropic";
  r.str("kind", kind);
  if (kind == "polytropic") {
    p.kind = LawKind::Polytropic;
    r.num("kappa", p.kappa);
    r.num("gamma", p.gamma);
  } else if (kind == "white_dwarf") {
    p.kind = LawKind::WhiteDwarf;
    r.num("C1", p.C1);
    r.num("C2", p.C2);
    r.num("C3", p.C3);
  } else if (kind == "p_delta") {
    p.kind = LawKind::PDelta;
    r.num("delta", p.delta);
    r.num("eps0", p.eps0);
  } else {
    throw ConfigError("law.kind: expected polytropic, white_dwarf or p_delta, got '" + kind + "'");
  }
  r.num("rho_lo", p.rho_lo);
  r.num("rho_hi", p.rho_hi);
  r.finish();
  return p;
}

json law_to_json(const LawParams& p) {
  json j;
  j["kind"] = kind_name(p.kind);
  switch (p.kind) {
    case LawKind::Polytropic:
      j["kappa"] = p.kappa;
      j["gamma"] = p.gamma;
      break;
    case LawKind::WhiteDwarf:
      j["C1"] = p.C1;
      j["C2"] = p.C2;
      j["C3"] = p.C3;
      break;
    case LawKind::PDelta:
      j["delta"] = p.delta;
      j["eps0"] = p.eps0;
      break;
  }
  j["rho_lo"] = p.rho_lo;
  j["rho_hi"] = p.rho_hi;
  return j;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader top(j, "");
  if (const json* law = top.object("law")) c.law = parse_law(*law);

  if (const json* s = top.object("solver")) {
    Reader r(*s, "solver");
    auto& sp = c.solver;
    r.num("M", sp.M);
    r.num("b", sp.b);
    r.num("eps", sp.eps);
    r.integer("N", sp.N);
    r.num("T", sp.T);
    r.num("cfl", sp.cfl);
    r.num("dt_growth", sp.dt_growth);
    r.integer("max_steps", sp.max_steps);
    r.integer("max_rejections", sp.max_rejections);
    std::string prof = profile_name(sp.profile);
    r.str("profile", prof);
    sp.profile = profile_from(prof);
    r.num("bump_radius", sp.bump_radius);
    r.num("shell_fraction", sp.shell_fraction);
    r.num("floor_fraction", sp.floor_fraction);
    r.finish();
  }
  if (const json* w = top.object("window")) {
    Reader r(*w, "window");
    r.num("d", c.window.d);
    r.num("D", c.window.D);
    r.integer("points", c.window.points);
    r.finish();
  }
  if (const json* o = top.object("output")) {
    Reader r(*o, "output");
    r.str("dir", c.out_dir);
    r.integer("snapshots", c.output.snapshots);
    r.boolean("uniform", c.output.uniform);
    r.integer("ledger_stride", c.output.ledger_stride);
    r.finish();
  }
  if (const json* s = top.object("sweep")) {
    Reader r(*s, "sweep");
    r.list("eps", c.sweep_eps);
    r.list("b", c.sweep_b);
    r.finish();
  }
  if (const json* e = top.object("eos")) {
    Reader r(*e, "eos");
    r.num("rho_min", c.eos_rho_min);
    r.num("rho_max", c.eos_rho_max);
    r.integer("per_decade", c.eos_per_decade);
    r.finish();
  }
  if (const json* m = top.object("critical_mass")) {
    Reader r(*m, "critical_mass");
    r.num("E0", c.E0);
    r.finish();
  }
  if (const json* g = top.object("goursat")) {
    Reader r(*g, "goursat");
    r.num("rho_max", c.goursat.rho_max);
    r.integer("N", c.goursat.N);
    r.num("tol", c.goursat.tol);
    r.integer("max_iter", c.goursat.max_iter);
    r.finish();
  }
  if (const json* k = top.object("kernel")) {
    Reader r(*k, "kernel");
    r.num("rho_max", c.kernel.rho_max);
    r.integer("N", c.kernel.N);
    r.num("tol", c.kernel.tol);
    r.integer("max_sweeps", c.kernel.max_sweeps);
    r.finish();
  }
  if (const json* d = top.object("dump")) {
    Reader r(*d, "dump");
    r.integer("rho_points", c.dump_rho);
    r.integer("u_points", c.dump_u);
    r.finish();
  }
  top.finish();

  const auto& sp = c.solver;
  positive(sp.M, "solver.M");
  positive(sp.b, "solver.b");
  if (!(sp.eps > 0))
    throw ConfigError("solver.eps: must be > 0; the inviscid limit is only reached through sweep-epsilon");
  positive(sp.N, "solver.N");
  positive(sp.T, "solver.T");
  positive(sp.cfl, "solver.cfl");
  positive(sp.dt_growth, "solver.dt_growth");
  positive(double(sp.max_steps), "solver.max_steps");
  positive(sp.bump_radius, "solver.bump_radius");
  positive(sp.shell_fraction, "solver.shell_fraction");
  positive(sp.floor_fraction, "solver.floor_fraction");
  positive(c.window.d, "window.d");
  if (c.window.points < 2) throw ConfigError("window.points: need at least 2");
  if (c.output.snapshots < 1) throw ConfigError("output.snapshots: need at least 1");
  if (c.output.ledger_stride < 1) throw ConfigError("output.ledger_stride: need at least 1");
  if (c.out_dir.empty()) throw ConfigError("output.dir: must not be empty");
  for (double e : c.sweep_eps) positive(e, "sweep.eps");
  for (double b : c.sweep_b) positive(b, "sweep.b");
  positive(c.eos_rho_min, "eos.rho_min");
  if (!(c.eos_rho_max > c.eos_rho_min)) throw ConfigError("eos.rho_max: must exceed eos.rho_min");
  positive(c.eos_per_decade, "eos.per_decade");
  if (!(c.E0 >= 0)) throw ConfigError("critical_mass.E0: must be >= 0");
  positive(c.goursat.N, "goursat.N");
  positive(c.goursat.tol, "goursat.tol");
  positive(c.kernel.N, "kernel.N");
  positive(c.kernel.tol, "kernel.tol");
  positive(c.dump_rho, "dump.rho_points");
  positive(c.dump_u, "dump.u_points");

  c.solver.d = c.window.d;
  c.solver.D = c.window.D;
  PressureLaw law(c.law);  // gamma ranges and structure
  (void)law;
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["law"] = law_to_json(c.law);
  const auto& sp = c.solver;
  j["solver"] = {{"M", sp.M},
                 {"b", sp.b},
                 {"eps", sp.eps},
                 {"N", sp.N},
                 {"T", sp.T},
                 {"cfl", sp.cfl},
                 {"dt_growth", sp.dt_growth},
                 {"max_steps", sp.max_steps},
                 {"max_rejections", sp.max_rejections},
                 {"profile", profile_name(sp.profile)},
                 {"bump_radius", sp.bump_radius},
                 {"shell_fraction", sp.shell_fraction},
                 {"floor_fraction", sp.floor_fraction}};
  j["window"] = {{"d", c.window.d}, {"D", c.window.D}, {"points", c.window.points}};
  j["output"] = {{"dir", c.out_dir},
                 {"snapshots", c.output.snapshots},
                 {"uniform", c.output.uniform},
                 {"ledger_stride", c.output.ledger_stride}};
  j["sweep"] = {{"eps", c.sweep_eps}, {"b", c.sweep_b}};
  j["eos"] = {{"rho_min", c.eos_rho_min}, {"rho_max", c.eos_rho_max}, {"per_decade", c.eos_per_decade}};
  j["critical_mass"] = {{"E0", c.E0}};
  j["goursat"] = {{"rho_max", c.goursat.rho_max}, {"N", c.goursat.N}, {"tol", c.goursat.tol},
                  {"max_iter", c.goursat.max_iter}};
  j["kernel"] = {{"rho_max", c.kernel.rho_max}, {"N", c.kernel.N}, {"tol", c.kernel.tol},
                 {"max_sweeps", c.kernel.max_sweeps}};
  j["dump"] = {{"rho_points", c.dump_rho}, {"u_points", c.dump_u}};
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    if (!node->is_object()) throw ConfigError("override '" + assignment + "': " + parts[i] + " is not an object");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (parts.empty() || parts.back().empty()) throw ConfigError("override '" + assignment + "': empty key");
  if (!node->is_object()) throw ConfigError("override '" + assignment + "': parent is not an object");
  (*node)[parts.back()] = value;
}

void validate_for_solver(const RunConfig& c) {
  PressureLaw law(c.law);
  validate_spec(c.solver, law);
}

}  // namespace sg
