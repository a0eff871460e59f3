// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "critical_mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace sg {

namespace {

constexpr double kRhoScanLo = -12.0, kRhoScanHi = 12.0;
constexpr int kRhoPerDecade = 20;

void require_subcritical_range(const PressureLaw& law) {
  const double g = law.gamma2();
  if (!(g > 1.2 && g < 4.0 / 3.0))
    throw NotApplicable("beta-family critical mass needs gamma2 in (6/5, 4/3)");
}

struct Exponents {
  double g, p, q;  // q = 3(g-1)/(4-3g), p = (5g-6)/(4-3g)
  explicit Exponents(double g2) : g(g2), p((5 * g2 - 6) / (4 - 3 * g2)), q(3 * (g2 - 1) / (4 - 3 * g2)) {}
};

// ln of the leading coefficient A in F(M) = A M^-p - beta M/omega3 - E0/omega3
long double log_A(double g, double B) {
  const Exponents x(g);
  return std::log((long double)(4 - 3 * g)) - (long double)x.q * std::log((long double)B / (3 * (g - 1)));
}

// e(rho) on the fixed scan grid, shared by every beta
struct EGrid {
  std::vector<double> lnrho, e;
  explicit EGrid(const PressureLaw& law) {
    const int n = int((kRhoScanHi - kRhoScanLo) * kRhoPerDecade) + 1;
    for (int i = 0; i < n; ++i) {
      const double r = std::pow(10.0, kRhoScanLo + double(i) / kRhoPerDecade);
      lnrho.push_back(std::log(r));
      e.push_back(law.e(r));
    }
  }
};

CmaxResult c_max_on(const PressureLaw& law, double beta, const EGrid& eg) {
  if (!(beta > 0.0)) throw DomainError("c_max: beta must be > 0");
  const double g = law.gamma2(), s = 1.0 / (5 * g - 6);
  auto lng = [&](double lr, double e) { return s * ((g - 1) * lr - std::log(beta + e)); };
  std::size_t best = 0;
  double bv = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eg.e.size(); ++i) {
    const double v = lng(eg.lnrho[i], eg.e[i]);
    if (v > bv) { bv = v; best = i; }
  }
  CmaxResult r;
  r.rho_arg = std::exp(eg.lnrho[best]);
  if (best == 0 || best + 1 == eg.e.size()) {
    r.at_boundary = true;
  } else {
    auto f = [&](double lr) { return -lng(lr, law.e(std::exp(lr))); };
    auto m = boost::math::tools::brent_find_minima(f, eg.lnrho[best - 1], eg.lnrho[best + 1], 52);
    if (-m.second > bv) {
      bv = -m.second;
      r.rho_arg = std::exp(m.first);
    }
  }
  r.value = std::exp(bv);
  const double lim = c_max_limit(law);
  if (lim >= r.value) {
    r.value = lim;
    r.at_boundary = true;
    r.rho_arg = std::numeric_limits<double>::infinity();
  }
  return r;
}

McBeta m_c_of_beta_on(const PressureLaw& law, double beta, double E0, const EGrid& eg) {
  require_subcritical_range(law);
  if (!(E0 >= 0.0)) throw DomainError("m_c_of_beta: E0 must be >= 0");
  McBeta out;
  out.beta = beta;
  const CmaxResult c = c_max_on(law, beta, eg);
  out.cmax = c.value;
  out.cmax_at_boundary = c.at_boundary;
  out.B = b_beta(law, c.value);
  const double g = law.gamma2();
  const Exponents x(g);
  const long double w3 = surface_area(3), lA = log_A(g, out.B);
  auto G = [&](long double t) { return lA + std::log(w3) - (long double)x.p * t - std::log(beta * std::exp(t) + (long double)E0); };
  long double t1 = (lA + std::log(w3) - std::log((long double)beta)) / (x.p + 1);
  long double hi = t1;
  if (E0 > 0) hi = std::min(hi, (lA + std::log(w3) - std::log((long double)E0)) / (long double)x.p);
  long double lo = hi - 1;
  long double Glo = G(lo), Ghi = G(hi);
  for (int it = 0; Glo < 0 && it < 400; ++it) { lo -= 2; Glo = G(lo); }
  for (int it = 0; Ghi > 0 && it < 400; ++it) { hi += 2; Ghi = G(hi); }
  if (Glo < 0 || Ghi > 0) throw NumericalError("m_c_of_beta: no sign change in bracket");
  boost::uintmax_t iters = 300;
  auto tol = [](long double a, long double b) { return std::fabs(a - b) <= 4 * std::numeric_limits<long double>::epsilon() * std::max((long double)1, std::fabs(a)); };
  auto br = boost::math::tools::toms748_solve(G, lo, hi, Glo, Ghi, tol, iters);
  long double t = (br.first + br.second) / 2;
  out.M = (double)std::exp(t);
  const long double A = std::exp(lA), M = out.M;
  const long double T1 = A * std::pow(M, -(long double)x.p), T2 = beta * M / w3, T3 = E0 / w3;
  out.residual = (double)(T1 - T2 - T3);
  out.residual_rel = std::fabs(out.residual) / (double)(T1 + T2 + T3);
  out.residual_spec = std::fabs(out.residual) / (E0 / (double)w3 + 1.0);
  return out;
}

}  // namespace

double surface_area(int n) {
  if (n < 2) throw DomainError("surface_area: dimension must be >= 2");
  return 2.0 * std::pow(boost::math::constants::pi<double>(), n / 2.0) / boost::math::tgamma(n / 2.0);
}

double sobolev_A(int n) {
  if (n < 3) throw DomainError("sobolev_A: dimension must be >= 3");
  return 4.0 / (n * (n - 2.0)) * std::pow(surface_area(n + 1), -2.0 / n);
}

double c_max_limit(const PressureLaw& law) {
  const double g = law.gamma2();
  return std::pow(law.kappa2() / (g - 1), -1.0 / (5 * g - 6));
}

CmaxResult c_max(const PressureLaw& law, double beta) {
  require_subcritical_range(law);
  return c_max_on(law, beta, EGrid(law));
}

double b_beta(const PressureLaw& law, double cmax) {
  const double g = law.gamma2();
  return 2.0 / 3.0 * std::pow(surface_area(4), -2.0 / 3.0) * std::pow(surface_area(3), (4 - 3 * g) / (3 * (g - 1))) *
         std::pow(cmax, (5 * g - 6) / (3 * (g - 1)));
}

McBeta m_c_of_beta(const PressureLaw& law, double beta, double E0) {
  require_subcritical_range(law);
  return m_c_of_beta_on(law, beta, E0, EGrid(law));
}

double m_c_residual(const PressureLaw& law, double B, double M, double beta, double E0) {
  const Exponents x(law.gamma2());
  const long double w3 = surface_area(3);
  const long double A = std::exp(log_A(law.gamma2(), B));
  return (double)(A * std::pow((long double)M, -(long double)x.p) - beta * (long double)M / w3 - E0 / w3);
}

double m_tilde(const PressureLaw& law, double E0) {
  require_subcritical_range(law);
  if (!(E0 > 0.0)) throw DomainError("m_tilde: E0 must be > 0");
  const Exponents x(law.gamma2());
  const double B = b_beta(law, c_max_limit(law));
  return (double)std::exp((log_A(law.gamma2(), B) + std::log((long double)surface_area(3)) - std::log((long double)E0)) / x.p);
}

double m_tilde_literal(const PressureLaw& law, double E0) {
  require_subcritical_range(law);
  if (!(E0 > 0.0)) throw DomainError("m_tilde: E0 must be > 0");
  const double g = law.gamma2(), w3 = surface_area(3), w4 = surface_area(4);
  const double inner = 2.0 / (9 * (g - 1)) * std::pow(law.kappa2() / (g - 1), -1.0 / (3 * (g - 1))) *
                       std::pow(w3, -(4 - 3 * g) / (3 * (g - 1))) * std::pow(w4, -2.0 / 3.0);
  return std::pow(inner, -3 * (g - 1) / (5 * g - 6)) * std::pow(E0 / (4 - 3 * g), -(4 - 3 * g) / (5 * g - 6));
}

// Dimensional hydrostatic system for P = kappa rho^(4/3) with Delta phi = rho:
// H' = -m/r^2, m' = r^2 (H/(4 kappa))^3, H = 4 kappa rho^(1/3) the enthalpy.
LaneEmden lane_emden(double kappa2, double rho_c, int steps_per_unit) {
  if (!(kappa2 > 0.0) || !(rho_c > 0.0)) throw DomainError("lane_emden: kappa2 and rho_c must be > 0");
  const double a = std::sqrt(4 * kappa2) * std::pow(rho_c, -1.0 / 3.0);  // length scale
  const double H0 = 4 * kappa2 * std::cbrt(rho_c);
  const double c4 = 1.0 / (4 * kappa2);
  struct Y { double H, m; };
  auto rhs = [&](double r, const Y& y) {
    const double th = y.H * c4;
    return Y{-y.m / (r * r), r * r * th * th * th};
  };
  auto rk4 = [&](double r, const Y& y, double h) {
    const Y k1 = rhs(r, y);
    const Y k2 = rhs(r + h / 2, {y.H + h / 2 * k1.H, y.m + h / 2 * k1.m});
    const Y k3 = rhs(r + h / 2, {y.H + h / 2 * k2.H, y.m + h / 2 * k2.m});
    const Y k4 = rhs(r + h, {y.H + h * k3.H, y.m + h * k3.m});
    return Y{y.H + h / 6 * (k1.H + 2 * k2.H + 2 * k3.H + k4.H), y.m + h / 6 * (k1.m + 2 * k2.m + 2 * k3.m + k4.m)};
  };
  // series start at xi0: theta = 1 - xi^2/6 + xi^4/40 - 19 xi^6/5040
  const double h = a / steps_per_unit, xi0 = 1.0 / steps_per_unit;
  const double th0 = 1 - xi0 * xi0 / 6 + std::pow(xi0, 4) / 40 - 19 * std::pow(xi0, 6) / 5040;
  const double dth0 = -xi0 / 3 + std::pow(xi0, 3) / 10 - 19 * std::pow(xi0, 5) / 840;
  double r = xi0 * a;
  Y y{H0 * th0, -rho_c * a * a * a * xi0 * xi0 * dth0};
  const double rmax = 20 * a;
  while (r < rmax) {
    const Y n = rk4(r, y, h);
    if (n.H <= 0.0) {
      // secant on the step length for H = 0
      double s0 = 0.0, s1 = h, f0 = y.H, f1 = n.H;
      for (int it = 0; it < 60 && std::fabs(s1 - s0) > 1e-15 * h; ++it) {
        const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1; f0 = f1;
        s1 = s2; f1 = rk4(r, y, s1).H;
      }
      const Y z = rk4(r, y, s1);
      const double r1 = r + s1;
      LaneEmden out;
      out.xi1 = r1 / a;
      out.xi1sq_dtheta = z.m / (rho_c * a * a * a);
      out.mass = surface_area(3) * z.m;
      return out;
    }
    y = n;
    r += h;
  }
  throw NumericalError("lane_emden: no zero crossing before xi = 20");
}

double lane_emden_mass(double kappa2) { return lane_emden(kappa2, 1.0).mass; }

std::vector<double> default_h_grid() {
  std::vector<double> g;
  for (int i = -120; i <= 120; ++i) g.push_back(std::pow(10.0, i / 10.0));
  return g;
}

HMonotone h_monotone(const PressureLaw& law, const std::vector<double>& grid) {
  HMonotone out;
  double prev = law.h(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = law.h(grid[i]);
    const double scale = law.P(grid[i]) / grid[i];
    if (!(v - prev > 1e-12 * scale)) {
      out.increasing = false;
      out.first_violation = grid[i];
      return out;
    }
    prev = v;
  }
  return out;
}

CriticalMassReport critical_mass(const PressureLaw& law, double E0) {
  CriticalMassReport rep;
  rep.E0 = E0;
  const double g = law.gamma2();
  rep.h = h_monotone(law, default_h_grid());
  if (std::fabs(g - 4.0 / 3.0) < 1e-12) {
    rep.chandrasekhar = true;
    rep.M_ch = lane_emden_mass(law.kappa2());
    rep.M_c = rep.M_ch;
    return rep;
  }
  if (g > 4.0 / 3.0) throw NotApplicable("critical mass: gamma2 > 4/3 imposes no mass restriction");
  require_subcritical_range(law);
  if (!(E0 > 0.0)) throw DomainError("critical_mass: E0 must be > 0");
  const EGrid eg(law);
  const int n = 381;
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    const double beta = std::pow(10.0, -30.0 + 38.0 * i / (n - 1));
    rep.samples.push_back(m_c_of_beta_on(law, beta, E0, eg));
    if (rep.samples.back().M > rep.samples[best].M) best = rep.samples.size() - 1;
  }
  rep.M_c = rep.samples[best].M;
  rep.beta_argmax = rep.samples[best].beta;
  if (best == 0 || best + 1 == rep.samples.size()) {
    rep.argmax_at_grid_edge = true;
  } else {
    // three rounds of Brent (golden-section + parabolic) refinement on ln beta around the best sample
    double lo = std::log(rep.samples[best - 1].beta), hi = std::log(rep.samples[best + 1].beta);
    for (int round = 0; round < 3; ++round) {
      auto f = [&](double lb) { return -m_c_of_beta_on(law, std::exp(lb), E0, eg).M; };
      auto m = boost::math::tools::brent_find_minima(f, lo, hi, 40);
      McBeta s = m_c_of_beta_on(law, std::exp(m.first), E0, eg);
      if (s.M > rep.M_c) {
        rep.M_c = s.M;
        rep.beta_argmax = s.beta;
      }
      rep.samples.push_back(s);
      const double w = (hi - lo) / 4;
      lo = m.first - w;
      hi = m.first + w;
    }
  }
  for (const auto& s : rep.samples) {
    rep.max_residual_rel = std::max(rep.max_residual_rel, s.residual_rel);
    rep.max_residual_spec = std::max(rep.max_residual_spec, s.residual_spec);
  }
  rep.M_tilde = m_tilde(law, E0);
  rep.M_tilde_literal = m_tilde_literal(law, E0);
  return rep;
}

}  // namespace sg
