// SPDX-License-Identifier: MIT
#include <cmath>
#include <random>

#include "doctest.h"
#include "goursat.hpp"

using namespace sg;

namespace {

PressureLaw poly(double kappa, double gamma) {
  LawParams p;
  p.kind = LawKind::Polytropic;
  p.kappa = kappa;
  p.gamma = gamma;
  return PressureLaw(p);
}

PressureLaw white_dwarf() {
  LawParams p;
  p.kind = LawKind::WhiteDwarf;
  return PressureLaw(p);
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("characteristics through a point") {
  auto law = poly(1, 2);
  const double rho = 1.0, kv = law.k(rho);
  CHECK(rel(kv, 2 * std::sqrt(2.0)) < 1e-14);

  auto [a, b] = characteristics_through(law, rho, kv);
  CHECK(rel(a.first, rho) < 1e-12);
  CHECK(b.first == doctest::Approx(0.0));

  auto [c, d] = characteristics_through(law, rho, 0.0);
  CHECK(rel(c.first, d.first) < 1e-14);
  CHECK(rel(law.k(c.first), 0.5 * kv) < 1e-12);

  // k(rho) = 2 sqrt(2 rho) inverted by hand: k(rho1) = 3 sqrt(2) / 2 gives rho1 = 9/16
  auto [e, g] = characteristics_through(law, rho, std::sqrt(2.0));
  CHECK(rel(e.first, 9.0 / 16.0) < 1e-12);
  CHECK(rel(e.second, 1.5 * std::sqrt(2.0)) < 1e-14);
  CHECK(rel(g.second, -0.5 * std::sqrt(2.0)) < 1e-14);

  CHECK_THROWS_AS(characteristics_through(law, rho, 1.01 * kv), DomainError);
}

TEST_CASE("field: boundary, oddness, vertex") {
  for (auto law : {poly(1, 1.4), poly(1, 2), white_dwarf()}) {
    GoursatOptions o;
    o.N = 256;
    auto f = solve_goursat(law, o);
    CHECK(f.iterations < o.max_iter);
    CHECK(f.fitted_ratio < 1.0);
    CHECK(f.deltas.back() <= o.tol);

    for (int s = 1; s <= f.N; ++s) {
      const double rho = f.lev_rho[s];
      const double E = rho * (0.5 * law.k(rho) * law.k(rho) + law.e(rho));
      CHECK(std::fabs(f.eta[f.idx(s, 0)] - E) <= 10 * o.tol * E);
      CHECK(std::fabs(f.eta[f.idx(0, s)] + E) <= 10 * o.tol * E);
    }

    // interior limit near the boundary characteristic matches the closed form
    const double rho = 0.3 * f.rho_max, kv = law.k(rho);
    const auto in = special_entropy(f, law, rho, kv * (1 - 1e-12));
    const auto out = special_entropy(f, law, rho, kv);
    CHECK(out.exterior);
    CHECK_FALSE(in.exterior);
    CHECK(rel(in.eta, out.eta) < 1e-4);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
      const double r = f.rho_max * U(rng);
      const double u = law.k(r) * (2 * U(rng) - 1);
      const auto p = special_entropy(f, law, r, u), m = special_entropy(f, law, r, -u);
      worst = std::max(worst, std::fabs(p.eta + m.eta) / (r * (u * u + law.k(r) * law.k(r)) + 1e-300));
    }
    CHECK(worst <= 1e-12);

    CHECK(special_entropy(f, law, 0.0, 0.0).eta == 0.0);
    double prev = 1e300;
    for (double r : {1e-2, 1e-4, 1e-6}) {
      const double v = std::fabs(special_entropy(f, law, r, 0.5 * law.k(r)).eta);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev < 1e-5);
  }
}

TEST_CASE("exterior closed forms") {
  auto law = poly(1, 1.4);
  GoursatOptions o;
  o.N = 64;
  auto f = solve_goursat(law, o);
  const double k1 = law.k(1.0), u = k1 + 1;
  const auto v = special_entropy(f, law, 1.0, u);
  CHECK(v.exterior);
  CHECK(rel(v.eta, 0.5 * u * u + law.e(1.0)) < 1e-15);

  for (double rho : {1e-3, 0.5, 3.0, 40.0}) {
    for (double fac : {1.0, 1.5, 4.0}) {
      for (double sgn : {-1.0, 1.0}) {
        const double uu = sgn * fac * law.k(rho);
        const double q = special_flux(f, law, rho, uu);
        const double expect = 0.5 * rho * std::fabs(uu) * uu * uu + sgn * rho * uu * (law.e(rho) + rho * law.de(rho));
        CHECK(std::fabs(q - expect) <= 1e-14 * std::fabs(expect));
        CHECK(q >= 0.5 * rho * std::fabs(uu) * uu * uu);
      }
    }
  }
}

TEST_CASE("refinement diagnostics") {
  for (auto law : {poly(1, 1.4), white_dwarf()}) {
    GoursatOptions o;
    o.N = 256;
    auto d = goursat_diagnostics(law, o);
    CHECK(d.fitted_ratio < 1.0);
    CHECK(d.boundary_error <= 10 * o.tol);
    CHECK(d.oddness_error <= 1e-14);
    CHECK(d.residual_order >= 1.0);
    CHECK(d.flux_order >= 1.0);
    CHECK(d.residual.back() < d.residual.front());
    CHECK(d.exterior_dissipation <= 1e-12);
    CHECK(d.exterior_q_min_margin >= 0.0);
    CHECK(std::isfinite(d.fit_max_change));
    CHECK(d.fit_max_change <= 1.0);
  }
}

TEST_CASE("lazy re-solve and errors") {
  auto law = poly(1, 2);
  GoursatOptions o;
  o.N = 64;
  SpecialEntropy se(law, o);
  const double r0 = se.field()->rho_max;
  const double r = 3 * r0;
  const auto v = se.entropy(r, 0.1 * law.k(r));
  CHECK_FALSE(v.exterior);
  CHECK(se.field()->rho_max >= r);

  GoursatOptions bad = o;
  bad.max_iter = 2;
  CHECK_THROWS_AS(solve_goursat(law, bad), NumericalError);
  bad = o;
  bad.tol = 0;
  CHECK_THROWS_AS(solve_goursat(law, bad), DomainError);
  auto f = solve_goursat(law, o);
  CHECK_THROWS_AS(special_entropy(f, law, -1.0, 0.0), DomainError);
}
