// SPDX-License-Identifier: MIT
#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "solver.hpp"

using namespace sg;

namespace {

constexpr double kOmega3 = 4.0 * M_PI;

PressureLaw poly(double gamma, double kappa = 1.0) {
  LawParams p;
  p.kappa = kappa;
  p.gamma = gamma;
  return PressureLaw(p);
}

SolverSpec small(int N = 256, double T = 0.25) {
  SolverSpec s;
  s.N = N;
  s.T = T;
  return s;
}

OutputPolicy quiet() {
  OutputPolicy o;
  o.snapshots = 4;
  return o;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// Uniform density rho on [a, R] with N cells of equal mass.
RadialState uniform_ball(double rho, double a, double R, int N) {
  RadialState s;
  s.N = N;
  s.a = a;
  s.dx = rho * (R * R * R - a * a * a) / 3 / N;
  s.r.resize(N + 1);
  s.u.assign(N + 1, 0.0);
  s.rho.assign(N, rho);
  for (int e = 0; e <= N; ++e) s.r[e] = std::cbrt(a * a * a + 3.0 * e * s.dx / rho);
  s.r[N] = R;
  s.rho_floor = 1e-14 * rho;
  return s;
}

}  // namespace

TEST_CASE("initial data carries the prescribed mass") {
  for (double M : {0.5, 1.0, 3.0}) {
    auto law = poly(2.0);
    SolverSpec sp = small(512);
    sp.M = M;
    const auto id = build_initial_data(sp, law);
    CHECK(rel(id.state.mass(), M) < 1e-12);
    for (int j = 0; j < id.state.N; ++j) REQUIRE(rel(id.state.rho[j] * id.state.volume(j), id.state.dx) < 1e-10);
  }
}

TEST_CASE("boundary density scales like b^-(3-alpha)") {
  for (double gamma : {1.4, 2.0}) {
    auto law = poly(gamma);
    for (double b : {1e2, 1e3, 1e4}) {
      SolverSpec sp = small(1024);
      sp.b = b;
      const auto id = build_initial_data(sp, law);
      const double level = std::pow(b, 3.0 - id.alpha);
      CAPTURE(gamma);
      CAPTURE(b);
      CHECK(id.rho_b * level >= 0.5);
      CHECK(id.rho_b * level <= 2.0);
      CHECK(id.state.rho.back() * level >= 0.5);
      CHECK(id.state.rho.back() * level <= 2.0);
    }
  }
}

TEST_CASE("alpha exponent") {
  CHECK(alpha_exponent(poly(2.0)) == doctest::Approx(0.5));
  CHECK(alpha_exponent(poly(1.4)) == doctest::Approx(0.5));
  CHECK(alpha_exponent(poly(1.1)) == doctest::Approx(3 * 0.1 / 1.1).epsilon(1e-14));
}

TEST_CASE("initial energy matches an independent quadrature") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double gamma : {1.4, 2.0}) {
    auto law = poly(gamma);
    SolverSpec sp = small(512);
    const auto id = build_initial_data(sp, law);
    const double a = id.state.a, b = id.state.r.back();
    auto rho = [&](double r) { return profile_density(id, sp.bump_radius, r); };
    auto f = [&](double r) {
      const double q = rho(r);
      return q * law.e(q) * r * r;
    };
    const double E0 = kOmega3 * (ts.integrate(f, a, sp.bump_radius) + ts.integrate(f, sp.bump_radius, b));
    CAPTURE(gamma);
    CHECK(rel(id.E0, E0) < 1e-8);
    const double M = kOmega3 * (ts.integrate([&](double r) { return rho(r) * r * r; }, a, sp.bump_radius) +
                                ts.integrate([&](double r) { return rho(r) * r * r; }, sp.bump_radius, b));
    CHECK(rel(M, sp.M) < 1e-8);
    CHECK(rel(id.E0_discrete, id.E0) < 1e-3);
    CHECK(std::isfinite(id.E1));
    CHECK(id.E1 > 0);
  }
}

TEST_CASE("E1 scales with eps squared") {
  auto law = poly(2.0);
  SolverSpec sp = small(256);
  sp.eps = 0.1;
  const double e1 = build_initial_data(sp, law).E1;
  sp.eps = 0.05;
  const double e2 = build_initial_data(sp, law).E1;
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("infeasible tail is a config error") {
  auto law = poly(2.0);
  SolverSpec sp = small(256);
  sp.profile = Profile::BumpUniform;
  sp.b = 1e3;
  CHECK_THROWS_AS(build_initial_data(sp, law), ConfigError);
}

TEST_CASE("config errors") {
  auto law = poly(2.0);
  SolverSpec sp = small();
  sp.eps = 0;
  CHECK_THROWS_AS(run(sp, law), ConfigError);
  sp = small();
  sp.b = 0.5;
  CHECK_THROWS_AS(run(sp, law), ConfigError);
  sp = small();
  sp.N = 2;
  CHECK_THROWS_AS(run(sp, law), ConfigError);
  sp = small();
  sp.M = -1;
  CHECK_THROWS_AS(run(sp, law), ConfigError);
  LawParams p;
  p.gamma = 1.1;
  CHECK_THROWS_AS(run(small(), PressureLaw(p)), ConfigError);
}

TEST_CASE("gravity: outer edge and bound") {
  auto law = poly(2.0);
  const auto id = build_initial_data(small(512), law);
  const auto g = gravity(id.state);
  const double Mw = 1.0 / kOmega3;
  const auto& r = id.state.r;
  CHECK(rel(g.back() * r.back() * r.back(), Mw) < 1e-12);
  CHECK(g.front() == 0.0);
  for (size_t e = 0; e < g.size(); ++e) REQUIRE(std::fabs(g[e] * r[e] * r[e]) <= Mw * (1 + 1e-12));
}

TEST_CASE("gravity of a uniform ball") {
  const double rho = 2.5, a = 0.01, R = 1.5;
  const auto s = uniform_ball(rho, a, R, 300);
  const auto g = gravity(s);
  for (int e = 1; e <= s.N; ++e) {
    const double r = s.r[e];
    const double exact = rho / 3 * (r * r * r - a * a * a) / (r * r);
    REQUIRE(rel(g[e], exact) < 1e-12);
  }
}

TEST_CASE("hydrostatic state stays at rest") {
  auto law = poly(2.0);
  SolverSpec sp = small(256);
  sp.profile = Profile::Hydrostatic;
  sp.b = 5.0;
  auto s = build_initial_data(sp, law).state;
  double cmax = 0;
  for (double q : s.rho) cmax = std::max(cmax, law.sound_speed(q));
  for (int n = 0; n < 1000; ++n) {
    const double dt = stable_dt(s, law, sp.cfl);
    REQUIRE(step(s, dt, law, sp.cfl).accepted);
  }
  double umax = 0;
  for (double v : s.u) umax = std::max(umax, std::fabs(v));
  CHECK(umax <= 1e-6 * cmax);
}

TEST_CASE("a step past the CFL limit is rejected and leaves the state alone") {
  auto law = poly(2.0);
  SolverSpec sp = small(128);
  sp.profile = Profile::Hydrostatic;
  sp.b = 5.0;
  auto s = build_initial_data(sp, law).state;
  const auto before = s;
  const auto info = step(s, 10 * stable_dt(s, law, sp.cfl), law, sp.cfl);
  CHECK_FALSE(info.accepted);
  CHECK(s.r == before.r);
  CHECK(s.u == before.u);
  CHECK(s.tau == before.tau);
}

TEST_CASE("crossing edges raise a blowup with the cell index") {
  auto law = poly(2.0);
  auto s = build_initial_data(small(128), law).state;
  const double dt = 1e-6;
  s.u[10] = -2 * (s.r[10] - s.r[9]) / dt;
  try {
    step(s, dt, law, 1.0);
    FAIL("expected BlowupError");
  } catch (const BlowupError& e) {
    CHECK(e.cell == 9);
  }
}

TEST_CASE("mass is conserved to rounding over many steps") {
  auto law = poly(2.0);
  auto s = build_initial_data(small(128), law).state;
  const double M = s.mass();
  double drift = 0;
  for (int n = 0; n < 10000; ++n) {
    step(s, std::min(0.005, stable_dt(s, law, 0.4)), law, 0.4);
    drift = std::max(drift, rel(s.mass(), M));
  }
  CHECK(drift < 1e-13);
}

TEST_CASE("outer-cell density decays at the boundary rate") {
  auto law = poly(2.0);
  SolverSpec sp = small(1024, 0.02);
  auto s = build_initial_data(sp, law).state;
  const double rho0 = s.rho.back();
  const double rate0 = -law.P(rho0) / sp.eps;
  double prev = rho0;
  long increases = 0;
  while (s.tau < sp.T) {
    const double dt = std::min(stable_dt(s, law, sp.cfl), sp.T - s.tau);
    if (!step(s, dt, law, sp.cfl).accepted) continue;
    if (s.rho.back() > prev) ++increases;
    prev = s.rho.back();
  }
  CHECK(increases == 0);
  const double rate = (s.rho.back() - rho0) / s.tau;
  CHECK(rate < 0);
  CHECK(rel(rate, rate0) < 0.05);
}

TEST_CASE("run: ledger, boundary and bounds") {
  auto law = poly(2.0);
  const auto res = run(small(512, 0.5), law, quiet());
  REQUIRE_FALSE(res.failed);
  CHECK(res.max_mass_drift < 1e-13);
  CHECK(res.min_b_ratio >= 0.5);
  CHECK(res.min_lower_margin >= -1e-12);
  CHECK(res.boundary_increases == 0);
  CHECK(res.max_sobolev <= 1.01);
  const double b = res.ledger.back().b, b0 = res.ledger.front().b;
  CHECK(std::fabs(b - res.b_from_velocity) <= 1e-3 * std::fabs(b - b0) + 1e-12);
  CHECK(res.ledger.front().tau == 0.0);
  CHECK(res.ledger.back().tau == doctest::Approx(0.5).epsilon(1e-14));
  for (const auto& row : res.ledger) {
    REQUIRE(std::isfinite(row.E_total));
    REQUIRE(row.rho_boundary >= row.rho_lower * (1 - 1e-12));
    REQUIRE(row.E_total_plus == doctest::Approx(row.E_kinetic + row.E_internal + row.E_grav));
  }
  CHECK(res.snapshots.size() == 5);
  CHECK(res.snapshots.front().tau == 0.0);
}

TEST_CASE("energy residual shrinks under refinement") {
  auto law = poly(2.0);
  double prev = 1e300;
  for (int N : {256, 512, 1024}) {
    const auto res = run(small(N, 0.25), law, quiet());
    REQUIRE_FALSE(res.failed);
    CAPTURE(N);
    CHECK(res.max_residual < prev);
    CHECK(res.max_residual < 1e-3);
    prev = res.max_residual;
  }
}

TEST_CASE("runs are bitwise reproducible") {
  auto law = poly(1.4);
  const auto x = run(small(256, 0.1), law, quiet());
  const auto y = run(small(256, 0.1), law, quiet());
  REQUIRE(x.ledger.size() == y.ledger.size());
  for (size_t i = 0; i < x.ledger.size(); ++i) REQUIRE(x.ledger[i].E_total == y.ledger[i].E_total);
  CHECK(x.snapshots.back().state.r == y.snapshots.back().state.r);
}
