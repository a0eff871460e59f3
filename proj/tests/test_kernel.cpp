// SPDX-License-Identifier: MIT
#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "kernel.hpp"

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

// int chi dv over the cone with v = k sin t
double cone_integral(const std::function<double(double)>& f, double k) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double t) { return f(k * std::sin(t)) * k * std::cos(t); }, -M_PI / 2, M_PI / 2);
}

}  // namespace

TEST_CASE("B and M constants") {
  for (double lam : {0.25, 0.5, 2.0, 3.7}) {
    const double beta = std::sqrt(M_PI) * std::tgamma(lam + 1) / std::tgamma(lam + 1.5);
    CHECK(rel(kernel_B(lam), beta) < 1e-13);
    CHECK(kernel_M(lam) > 0);
  }
  // int sqrt(1 - z^2) = pi/2 by hand
  CHECK(rel(kernel_M(0.5), 2 * std::sqrt(2.0) / M_PI) < 1e-13);
  CHECK_THROWS_AS(kernel_B(0.0), DomainError);
}

TEST_CASE("closed form, gamma = 2") {
  auto law = poly(1, 2);
  // k = 2 sqrt(2 rho); unit mass fixes chi = sqrt(8 rho - v^2) / (4 pi)
  CHECK(rel(chi_closed_form(law, 1.0, 0.0), 1 / (std::sqrt(2.0) * M_PI)) < 1e-14);
  CHECK(rel(chi_closed_form(law, 0.5, 1.0), std::sqrt(3.0) / (4 * M_PI)) < 1e-14);
  CHECK(chi_closed_form(law, 1.0, std::sqrt(8.0)) == 0.0);
  CHECK(chi_closed_form(law, 1.0, -3.0) == 0.0);
  CHECK(chi_closed_form(law, 0.0, 0.0) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double r = 10 * U(rng) + 1e-6, v = law.k(r) * (2 * U(rng) - 1) * (1 - 1e-9);
    CHECK(chi_closed_form(law, r, v) > 0);
    CHECK(chi_closed_form(law, r, v) == chi_closed_form(law, r, -v));
  }

  // sigma(rho, u, s) = (s + u)/2 chi(rho, u - s) at (1, 0, 1)
  const double sigma = sigma_minus_u_chi_closed(law, 1.0, -1.0);
  CHECK(rel(sigma, 0.5 * chi_closed_form(law, 1.0, -1.0)) < 1e-15);

  CHECK_THROWS_AS(chi_closed_form(white_dwarf(), 1.0, 0.0), NotApplicable);
  CHECK_THROWS_AS(chi_closed_form(law, -1.0, 0.0), DomainError);
}

TEST_CASE("closed form moments") {
  for (auto law : {poly(1, 2), poly(0.7, 1.4), poly(2, 5.0 / 3.0)}) {
    for (double r : {1e-6, 0.3, 4.0}) {
      const double k = law.k(r);
      const double m0 = cone_integral([&](double v) { return chi_closed_form(law, r, v); }, k);
      const double m2 = cone_integral([&](double v) { return v * v * chi_closed_form(law, r, v); }, k);
      const double m1 = cone_integral([&](double v) { return v * sigma_minus_u_chi_closed(law, r, v); }, k);
      CHECK(rel(m0, r) < 1e-10);
      CHECK(rel(m2, 2 * r * law.e(r)) < 1e-10);
      CHECK(rel(m1, -law.P(r)) < 1e-10);
    }
  }
}

TEST_CASE("expansion coefficients") {
  auto law = poly(1, 1.4);
  KernelCoefficients c(law);
  const double a = c.a1(1.0);
  for (double r : {1e-4, 0.2, 7.0}) {
    CHECK(rel(c.a1(r), a) < 1e-12);
    CHECK(c.a2(r) == 0.0);
    CHECK(c.b2(r) == 0.0);
    CHECK(rel(c.b1(r) / c.a1(r), law.theta1()) < 1e-12);
    CHECK(rel(chi_closed_form(law, r, 0.0), c.a1(r) * std::pow(law.k(r), 2 * c.lambda())) < 1e-12);
  }

  auto wd = white_dwarf();
  KernelCoefficients w(wd);
  for (double r : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
    CHECK(w.D(r) > 0);
    CHECK(std::isfinite(w.a2(r)));
    CHECK(std::isfinite(w.b2(r)));
  }
}

TEST_CASE("grid against closed form") {
  for (auto law : {poly(1, 2), poly(1, 1.4)}) {
    KernelOptions o;
    o.N = 512;
    o.rho_max = 1.0;
    auto g = solve_kernel(law, o);
    CHECK(g.changes[g.changes.size() - 2] <= o.tol);
    const auto r = kernel_vs_closed_form(g, law);
    CHECK(r.chi_rel < 1e-3);
    CHECK(r.support <= 1e-8);
    CHECK(std::isfinite(r.boundary_rel));
    if (law.gamma1() == 2) CHECK(r.h_rel < 1e-3);

    // evaluator between nodes and levels
    double worst = 0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double rr = 0.05 + 0.95 * U(rng), v = law.k(rr) * (2 * U(rng) - 1);
      worst = std::max(worst, std::fabs(kernel_chi(g, law, rr, v) - chi_closed_form(law, rr, v)) /
                                  chi_closed_form(law, rr, 0.0));
    }
    CHECK(worst < 2e-3);
    CHECK(rel(kernel_mass(g, law, 1e-6), 1e-6) < 1e-2);
    CHECK(rel(kernel_mass(g, law, 0.5), 0.5) < 1e-4);
  }
}

TEST_CASE("white dwarf grid") {
  auto law = white_dwarf();
  KernelOptions o;
  o.N = 256;
  auto g = solve_kernel(law, o);
  CHECK(g.seeded >= 1);
  for (double r : {1e-6, 1e-2, 1.0, 100.0, 900.0}) CHECK(rel(kernel_mass(g, law, r), r) < 1e-3);
  CHECK_THROWS_AS(kernel_vs_closed_form(g, law), NotApplicable);
  CHECK_THROWS_AS(kernel_chi(g, law, 2 * g.rho_max, 0.0), DomainError);
  CHECK(kernel_chi(g, law, 1.0, 2 * law.k(1.0)) == 0.0);

  // psi = s^2 / 2 generates the mechanical pair
  EntropyKernel K(law, o);
  TestFunction t;
  t.lo = -1e3;
  t.hi = 1e3;
  t.psi = [](double s) { return 0.5 * s * s; };
  for (double r : {0.3, 3.0, 50.0}) {
    for (double u : {0.0, 0.7}) {
      const auto w = weak_entropy_pair(K, t, r, u);
      const auto m = mechanical_pair(law, r, r * u);
      CHECK(rel(w.eta, m.eta) < 1e-3);
      if (u != 0) CHECK(rel(w.q, m.q) < 1e-3);
      if (u == 0) CHECK(std::fabs(w.q) < 1e-12 * r);
    }
  }

  // growth constants on [rho^*, 100 rho^*] stable under doubling
  const auto psi = bump(0.3, 1.5);
  const double lo = law.rho_hi(), hi = 100 * law.rho_hi();
  KernelOptions o2 = o;
  o2.N = 2 * o.N;
  auto g2 = solve_kernel(law, o2);
  const auto f1 = kernel_growth_fits(g, law, psi, lo, hi), f2 = kernel_growth_fits(g2, law, psi, lo, hi);
  CHECK(f1.C_chi > 0);
  CHECK(rel(f2.C_chi, f1.C_chi) < 0.2);
  CHECK(rel(f2.C_h, f1.C_h) < 0.2);
  CHECK(rel(f2.C_eta, f1.C_eta) < 0.2);
  CHECK(rel(f2.C_q, f1.C_q) < 0.2);

  // entropy-equation residual of eta^psi shrinks under refinement
  for (double r : {0.5 * lo, 5 * lo, 30 * lo}) {
    CHECK(weak_entropy_residual(g2, law, psi, r, 0.2) < 0.5 * weak_entropy_residual(g, law, psi, r, 0.2));
  }
}

TEST_CASE("weak pairs and Galilean shift") {
  auto law = poly(1, 2);
  KernelOptions o;
  EntropyKernel K(law, o);
  const auto psi = bump(0.0, 1.0);
  CHECK(weak_entropy_pair(K, psi, 0.0, 0.3).eta == 0.0);
  // cone [u - k, u + k] misses the support
  const auto far = weak_entropy_pair(K, psi, 0.01, 5.0);
  CHECK(far.eta == 0.0);
  CHECK(far.q == 0.0);

  const double shift = 0.8;
  const auto moved = bump(shift, 1.0);
  for (double r : {0.05, 0.4, 2.0}) {
    for (double u : {-0.6, 0.0, 1.1}) {
      const auto a = weak_entropy_pair(K, psi, r, u), b = weak_entropy_pair(K, moved, r, u + shift);
      CHECK(std::fabs(a.eta - b.eta) <= 1e-13 * (std::fabs(a.eta) + 1e-300));
      // q carries u sigma: q(u + c) = q(u) + c eta
      CHECK(std::fabs(b.q - a.q - shift * a.eta) <= 1e-12 * (std::fabs(b.q) + std::fabs(a.eta)));
    }
  }

  // closed-form and grid paths agree for the same pair
  KernelOptions og;
  og.N = 512;
  og.rho_max = 3.0;
  EntropyKernel G(law, og, true);
  const auto c = weak_entropy_pair(K, psi, 1.0, 0.2), d = weak_entropy_pair(G, psi, 1.0, 0.2);
  CHECK(rel(d.eta, c.eta) < 1e-3);
  CHECK(rel(d.q, c.q) < 1e-3);
  CHECK(rel(G.h(1.0, -1.0), 0.5 * K.chi(1.0, -1.0)) < 1e-3);
  CHECK(G.h(0.0, 0.0) == 0.0);
}

TEST_CASE("mechanical pair") {
  auto law = poly(1, 2);
  const auto p = mechanical_pair(law, 1.0, 2.0);
  CHECK(rel(p.eta, 3.0) < 1e-15);
  // q = m^3/(2 rho^2) + m (e + P/rho) = 4 + 2 (1 + 1)
  CHECK(rel(p.q, 8.0) < 1e-15);
  const auto z = mechanical_pair(law, 0.0, 0.0);
  CHECK(z.eta == 0.0);
  CHECK(z.q == 0.0);
  CHECK_THROWS_AS(mechanical_pair(law, 0.0, 1.0), DomainError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto lw : {law, white_dwarf()}) {
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
      const double r = std::pow(10.0, 6 * U(rng) - 3), m = r * 4 * (2 * U(rng) - 1);
      const double hr = 1e-4 * r, hm = 1e-4 * (std::fabs(m) + r);
      auto E = [&](double a, double b) { return mechanical_pair(lw, a, b).eta; };
      const double err = 1e-7 * (std::fabs(E(r, m)) + r);
      const double Hrr = (E(r + hr, m) - 2 * E(r, m) + E(r - hr, m)) / (hr * hr);
      const double Hmm = (E(r, m + hm) - 2 * E(r, m) + E(r, m - hm)) / (hm * hm);
      const double Hrm = (E(r + hr, m + hm) - E(r + hr, m - hm) - E(r - hr, m + hm) + E(r - hr, m - hm)) / (4 * hr * hm);
      const double tol = err / (hr * hm);
      if (Hrr < -tol || Hmm < -tol || Hrr * Hmm - Hrm * Hrm < -tol * (std::fabs(Hrr) + std::fabs(Hmm))) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("solver errors") {
  auto law = poly(1, 2);
  KernelOptions o;
  o.N = 4;
  CHECK_THROWS_AS(solve_kernel(law, o), DomainError);
  o.N = 64;
  o.tol = 0;
  CHECK_THROWS_AS(solve_kernel(law, o), DomainError);
  o.tol = 1e-12;
  o.max_sweeps = 1;
  CHECK_THROWS_AS(solve_kernel(law, o), NumericalError);

  // lazy re-solve past the initial range
  KernelOptions s;
  s.N = 64;
  s.rho_max = 1.0;
  EntropyKernel K(white_dwarf(), s);
  CHECK(K.chi(5.0, 0.0) > 0);
}
