// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "critical_mass.hpp"
#include "diagnostics.hpp"

namespace sg {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

const double kOmega3 = surface_area(3);

double cube_diff(double r0, double r1) { return (r1 - r0) * (r1 * r1 + r1 * r0 + r0 * r0); }

double bump(double s) { return s >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s * s)); }

double dbump(double s) {
  if (s >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (q * q));
}

// rho_b (delta + (1 - delta) (r/b)^p); delta = 1 is the uniform tail.
struct Tail {
  double rho_b = 0, delta = 1, p = 0, a = 0, b = 0;

  double pw(double r) const { return std::exp(p * std::log(r / b)); }
  double density(double r) const { return rho_b * (delta + (1 - delta) * pw(r)); }
  double slope(double r) const { return rho_b * (1 - delta) * p / r * pw(r); }
  double cumulative(double r) const {
    const double lin = delta * cube_diff(a, r) / 3;
    const double sh = (1 - delta) * (r * r * r * pw(r) - a * a * a * pw(a)) / (p + 3);
    return rho_b * (lin + sh);
  }
};

// int_a^r bump(y/R) y^2 dy from node sums plus a Gauss-Legendre remainder.
class BumpMass {
 public:
  BumpMass(double a, double R, int K = 2048) : a_(a), R_(R), h_((R - a) / K), cum_(K + 1, 0.0) {
    for (int i = 0; i < K; ++i) cum_[i + 1] = cum_[i] + seg(a_ + i * h_, a_ + (i + 1) * h_);
  }
  double operator()(double r) const {
    if (r <= a_) return 0.0;
    if (r >= R_) return cum_.back();
    const int i = std::min(int((r - a_) / h_), int(cum_.size()) - 2);
    return cum_[i] + seg(a_ + i * h_, r);
  }

 private:
  double seg(double lo, double hi) const {
    return gauss<double, 10>::integrate([&](double y) { return bump(y / R_) * y * y; }, lo, hi);
  }
  double a_, R_, h_;
  std::vector<double> cum_;
};

double rho_of_P(const PressureLaw& law, double P) {
  if (law.kind() == LawKind::Polytropic) return std::pow(P / law.params().kappa, 1.0 / law.params().gamma);
  const double lp = std::log(P);
  auto f = [&](double l) { return std::log(law.P(std::exp(l))) - lp; };
  double lo = -80, hi = 80;
  boost::uintmax_t it = 200;
  auto res = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return std::exp(0.5 * (res.first + res.second));
}

void check_spec(const SolverSpec& s, const PressureLaw& law) {
  if (!(s.M > 0)) throw ConfigError("M must be positive");
  if (!(s.b > 1)) throw ConfigError("b must exceed 1 (inner radius a = 1/b)");
  if (!(s.eps > 0)) throw ConfigError("eps must be positive; the inviscid limit is only reached through sweep-epsilon");
  if (s.N < 4) throw ConfigError("N must be at least 4");
  if (!(s.T > 0)) throw ConfigError("T must be positive");
  if (!(s.cfl > 0 && s.cfl <= 1)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(s.dt_growth >= 1)) throw ConfigError("dt_growth must be >= 1");
  if (s.profile != Profile::Hydrostatic && !(s.bump_radius > 1 / s.b && s.bump_radius < s.b))
    throw ConfigError("bump_radius must lie in (a, b)");
  if (!(s.shell_fraction > 0 && s.floor_fraction > 0 && s.shell_fraction + s.floor_fraction < 1))
    throw ConfigError("shell_fraction and floor_fraction must be positive with sum below 1");
  law.require_solver_range();
}

double sum_e(const RadialState& s, const PressureLaw& law) {
  double E = 0;
  for (double r : s.rho) E += law.e(r);
  return kOmega3 * s.dx * E;
}

InitialData hydrostatic(const SolverSpec& spec, const PressureLaw& law) {
  const int N = spec.N;
  const double X = spec.M / kOmega3, dx = X / N, a = 1 / spec.b;
  std::vector<double> r3(N + 1);

  // Marches inward from the outer radius bh; returns r_0^3 - a^3, or a negative
  // count of the edges left when the volume runs out.
  auto march = [&](double bh) {
    r3[N] = bh * bh * bh;
    double P = 0.5 * dx * X / (bh * bh * bh * bh);
    for (int e = N; e >= 1; --e) {
      r3[e - 1] = r3[e] - 3 * dx / rho_of_P(law, P);
      if (r3[e - 1] <= a * a * a && e > 1) return -double(e);
      if (e > 1) {
        const double re = std::cbrt(r3[e - 1]);
        P += dx * (e - 1) * dx / (re * re * re * re);
      }
    }
    return r3[0] - a * a * a;
  };
  double lo = 1.0, hi = 1.0;
  while (march(lo) > 0) lo *= 0.5;
  while (march(hi) <= 0) {
    hi *= 2;
    if (hi > 1e8) throw NumericalError("hydrostatic profile: no outer radius found");
  }
  auto root = boost::math::tools::bisect([&](double bh) { return march(bh); }, lo, hi,
                                         boost::math::tools::eps_tolerance<double>(52));
  march(root.second);

  InitialData id;
  id.profile = Profile::Hydrostatic;
  RadialState& s = id.state;
  s.N = N;
  s.dx = dx;
  s.a = a;
  s.eps = spec.eps;
  s.r.resize(N + 1);
  s.u.assign(N + 1, 0.0);
  s.rho.resize(N);
  s.r[0] = a;
  for (int e = 1; e <= N; ++e) s.r[e] = std::cbrt(r3[e]);
  for (int j = 0; j < N; ++j) s.rho[j] = dx / s.volume(j);
  id.rho_b = s.rho.back();
  s.rho_floor = 1e-14 * id.rho_b;
  id.alpha = alpha_exponent(law);
  id.E0 = id.E0_discrete = sum_e(s, law);
  id.E1 = kOmega3 * energy_functionals(s, law).bd_grad;
  return id;
}

}  // namespace

void validate_spec(const SolverSpec& spec, const PressureLaw& law) { check_spec(spec, law); }

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::BumpShell: return "bump_shell";
    case Profile::BumpUniform: return "bump_uniform";
    case Profile::Hydrostatic: return "hydrostatic";
  }
  return "?";
}

double RadialState::volume(int j) const { return cube_diff(r[j], r[j + 1]) / 3; }

double RadialState::center(int j) const {
  return std::cbrt(0.5 * (r[j] * r[j] * r[j] + r[j + 1] * r[j + 1] * r[j + 1]));
}

double RadialState::mass() const {
  double m = 0;
  for (int j = 0; j < N; ++j) m += rho[j] * volume(j);
  return kOmega3 * m;
}

double alpha_exponent(const PressureLaw& law) {
  return std::min(0.5, 3 * (law.gamma1() - 1) / law.gamma1());
}

double profile_density(const InitialData& id, double bump_radius, double r) {
  if (id.profile == Profile::Hydrostatic) {
    const auto& s = id.state;
    if (r < s.a || r > s.b()) return 0.0;
    const int j = std::clamp(int(std::upper_bound(s.r.begin(), s.r.end(), r) - s.r.begin()) - 1, 0, s.N - 1);
    return s.rho[j];
  }
  Tail t;
  t.rho_b = id.rho_b;
  t.delta = id.floor_delta;
  t.p = id.shell_p;
  t.a = id.state.a;
  t.b = id.state.r.back();
  return id.amplitude * bump(r / bump_radius) + t.density(r);
}

InitialData build_initial_data(const SolverSpec& spec, const PressureLaw& law) {
  check_spec(spec, law);
  if (spec.profile == Profile::Hydrostatic) return hydrostatic(spec, law);

  const int N = spec.N;
  const double b = spec.b, a = 1 / b, X = spec.M / kOmega3, dx = X / N;
  const double alpha = alpha_exponent(law), rho_b = std::pow(b, -(3 - alpha));
  if (rho_b > law.rho_lo()) throw ConfigError("b too small: tail density b^-(3-alpha) exceeds rho_*");

  Tail tail;
  tail.rho_b = rho_b;
  tail.a = a;
  tail.b = b;
  const double U = rho_b * cube_diff(a, b) / 3;
  if (spec.profile == Profile::BumpUniform || U <= spec.floor_fraction * X) {
    tail.delta = 1;
    tail.p = 0;
  } else {
    tail.delta = spec.floor_fraction * X / U;
    tail.p = std::max(2.0, (1 - tail.delta) * rho_b * b * b * b / (spec.shell_fraction * X) - 3);
  }
  const double Tm = tail.cumulative(b);
  if (Tm >= X) throw ConfigError("initial data: tail alone carries mass >= M; raise M or b");

  const double R = spec.bump_radius;
  BumpMass bm(a, R);
  const double amp = (X - Tm) / bm(R);
  auto cum = [&](double r) { return amp * bm(r) + tail.cumulative(r); };
  auto dens = [&](double r) { return amp * bump(r / R) + tail.density(r); };

  InitialData id;
  id.profile = tail.delta == 1 ? Profile::BumpUniform : Profile::BumpShell;
  id.alpha = alpha;
  id.amplitude = amp;
  id.shell_p = tail.p;
  id.floor_delta = tail.delta;
  id.rho_b = dens(b);

  RadialState& s = id.state;
  s.N = N;
  s.dx = dx;
  s.a = a;
  s.eps = spec.eps;
  s.r.resize(N + 1);
  s.u.assign(N + 1, 0.0);
  s.rho.resize(N);
  s.r[0] = a;
  s.r[N] = b;
  for (int e = 1; e < N; ++e) {
    const double target = e * dx;
    auto f = [&](double r) { return cum(r) - target; };
    double lo = s.r[e - 1], flo = f(lo), fhi = f(b);
    if (flo >= 0) {
      s.r[e] = lo;
      continue;
    }
    boost::uintmax_t it = 200;
    auto res = boost::math::tools::toms748_solve(f, lo, b, flo, fhi, boost::math::tools::eps_tolerance<double>(52), it);
    s.r[e] = 0.5 * (res.first + res.second);
  }
  for (int j = 0; j < N; ++j) {
    const double v = s.volume(j);
    if (!(v > 0)) throw NumericalError("initial data: degenerate cell " + std::to_string(j));
    s.rho[j] = dx / v;
  }
  s.rho_floor = 1e-14 * rho_b;

  // Breakpoints at the bump edge and where the shell starts to matter.
  std::vector<double> bp{a, std::min(0.5 * R, b), std::min(R, b)};
  if (tail.delta < 1) bp.push_back(std::max(bp.back(), b * std::exp(-40 / tail.p)));
  bp.push_back(b);
  auto integrate = [&](auto g) {
    double acc = 0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i)
      if (bp[i + 1] > bp[i]) acc += gauss_kronrod<double, 61>::integrate(g, bp[i], bp[i + 1], 20, 1e-14);
    return acc;
  };
  id.E0 = kOmega3 * integrate([&](double r) {
    const double rho = dens(r);
    return rho * law.e(rho) * r * r;
  });
  id.E1 = kOmega3 * spec.eps * spec.eps * integrate([&](double r) {
    const double rho = dens(r);
    const double dr = amp * dbump(r / R) / R + tail.slope(r);
    return dr * dr / (4 * rho) * r * r;
  });
  id.E0_discrete = sum_e(s, law);
  return id;
}

std::vector<double> gravity(const RadialState& s) {
  std::vector<double> g(s.N + 1, 0.0);
  for (int e = 1; e <= s.N; ++e) g[e] = e * s.dx / (s.r[e] * s.r[e]);
  return g;
}

namespace {

// Explicit accelerations (pressure, gravity, -2 eps r rho_x u) and the power of the last term.
double explicit_rhs(const RadialState& s, const PressureLaw& law, const std::vector<double>& r,
                    const std::vector<double>& u, std::vector<double>& rho, std::vector<double>& P,
                    std::vector<double>& acc) {
  const int N = s.N;
  const double dx = s.dx, eps = s.eps;
  for (int j = 0; j < N; ++j) {
    rho[j] = 3 * dx / cube_diff(r[j], r[j + 1]);
    P[j] = law.P(rho[j]);
  }
  double power = 0;
  acc[0] = 0;
  for (int e = 1; e < N; ++e) {
    const double re = r[e], r2 = re * re;
    const double nc = -2 * eps * re * (rho[e] - rho[e - 1]) / dx * u[e];
    acc[e] = -r2 * (P[e] - P[e - 1]) / dx - e * dx / r2 + nc;
    power += dx * u[e] * nc;
  }
  const double rb = r[N], r2 = rb * rb;
  const double nc = -2 * eps * rb * (rho[N - 1] - rho[N - 2]) / dx * u[N];
  acc[N] = 2 * r2 * P[N - 1] / dx - N * dx / r2 + nc;
  power += 0.5 * dx * u[N] * nc;
  return power;
}

int first_fold(const std::vector<double>& r) {
  for (std::size_t e = 1; e < r.size(); ++e)
    if (!(r[e] > r[e - 1])) return int(e) - 1;
  return -1;
}

}  // namespace

double stable_dt(const RadialState& s, const PressureLaw& law, double cfl) {
  double dt = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.N; ++j) dt = std::min(dt, cfl * (s.r[j + 1] - s.r[j]) / law.sound_speed(s.rho[j]));
  double rate = 0;
  for (int e = 1; e <= s.N; ++e) {
    const int j = std::min(e, s.N - 1);
    rate = std::max(rate, 2 * s.eps * s.r[e] * std::fabs(s.rho[j] - s.rho[j - 1]) / s.dx);
  }
  if (rate > 0) dt = std::min(dt, 0.5 / rate);
  return dt;
}

namespace {

// Backward Euler for eps r^2 (rho^2 (r^2 u)_x)_x on the geometry (r, rho), in
// w = r^2 u where the system is symmetric positive tridiagonal. Returns the dissipated work.
double viscous_solve(const RadialState& s, const std::vector<double>& r, const std::vector<double>& rho, double dt,
                     std::vector<double>& u) {
  const int N = s.N;
  const double dx = s.dx;
  std::vector<double> k(N), diag(N + 1), off(N + 1), rhs(N + 1), w(N + 1, 0.0);
  for (int j = 0; j < N; ++j) k[j] = dt * s.eps * rho[j] * rho[j] / dx;
  for (int e = 1; e <= N; ++e) {
    const double m = e == N ? 0.5 * dx : dx, r2 = r[e] * r[e];
    diag[e] = m / (r2 * r2) + k[e - 1] + (e < N ? k[e] : 0.0);
    off[e] = e < N ? -k[e] : 0.0;  // coupling e <-> e+1
    rhs[e] = m * u[e] / r2;
  }
  for (int e = 2; e <= N; ++e) {
    const double f = off[e - 1] / diag[e - 1];
    diag[e] -= f * off[e - 1];
    rhs[e] -= f * rhs[e - 1];
  }
  w[N] = rhs[N] / diag[N];
  for (int e = N - 1; e >= 1; --e) w[e] = (rhs[e] - off[e] * w[e + 1]) / diag[e];
  double work = 0;
  for (int j = 0; j < N; ++j) work += k[j] * (w[j + 1] - w[j]) * (w[j + 1] - w[j]);
  u[0] = 0;
  for (int e = 1; e <= N; ++e) u[e] = w[e] / (r[e] * r[e]);
  return work;
}

}  // namespace

// The predictor velocity also passes through the viscous solve, so the radii
// never see the unbalanced pressure kick on the outer half cell.
StepInfo step(RadialState& s, double dt, const PressureLaw& law, double cfl) {
  const int N = s.N;
  std::vector<double> rho(N), P(N), a1(N + 1), a2(N + 1), r1(N + 1), u1(N + 1);

  const double p1 = explicit_rhs(s, law, s.r, s.u, rho, P, a1);
  for (int e = 0; e <= N; ++e) u1[e] = s.u[e] + dt * a1[e];
  viscous_solve(s, s.r, rho, dt, u1);
  for (int e = 0; e <= N; ++e) r1[e] = s.r[e] + dt * u1[e];
  if (int j = first_fold(r1); j >= 0) throw BlowupError("non-monotone radii at cell " + std::to_string(j), j);
  const double p2 = explicit_rhs(s, law, r1, u1, rho, P, a2);

  std::vector<double> rn(N + 1), un(N + 1);
  for (int e = 0; e <= N; ++e) {
    rn[e] = s.r[e] + 0.5 * dt * (s.u[e] + u1[e]);
    un[e] = s.u[e] + 0.5 * dt * (a1[e] + a2[e]);
  }
  rn[0] = s.a;
  if (int j = first_fold(rn); j >= 0) throw BlowupError("non-monotone radii at cell " + std::to_string(j), j);
  for (int j = 0; j < N; ++j) {
    rho[j] = 3 * s.dx / cube_diff(rn[j], rn[j + 1]);
    if (!(rho[j] >= s.rho_floor)) throw BlowupError("density below floor at cell " + std::to_string(j), j);
  }

  StepInfo info;
  info.visc_work = viscous_solve(s, rn, rho, dt, un);
  info.nc_work = -0.5 * dt * (p1 + p2);

  RadialState next = s;
  next.r = std::move(rn);
  next.u = std::move(un);
  next.rho = std::move(rho);
  info.dt_limit = stable_dt(next, law, cfl);
  if (dt > 1.5 * info.dt_limit) {
    info.accepted = false;
    return info;
  }
  next.tau = s.tau + dt;
  s = std::move(next);
  return info;
}

namespace {

// int r^2 dr over the part of cell j inside [lo, hi]
double overlap(const RadialState& s, int j, double lo, double hi) {
  const double x0 = std::max(lo, s.r[j]), x1 = std::min(hi, s.r[j + 1]);
  return x1 > x0 ? cube_diff(x0, x1) / 3 : 0.0;
}

struct Integrands {
  double rhoP = 0, u3 = 0, rho_g2 = 0, bd_rate = 0, diss = 0, bnd = 0;
};

Integrands integrands(const RadialState& s, const PressureLaw& law, const EnergyFunctionals& f, double d, double D) {
  Integrands I;
  const double g2 = law.gamma2();
  for (int j = 0; j < s.N; ++j) {
    if (s.r[j + 1] <= d) continue;
    const double rho = s.rho[j], far = overlap(s, j, d, 1e300);
    I.rhoP += rho * law.P(rho) * far;
    I.rho_g2 += std::pow(rho, g2 + 1) * far;
    const double in = overlap(s, j, d, D);
    if (in > 0) {
      const double u0 = std::fabs(s.u[j]), u1 = std::fabs(s.u[j + 1]);
      I.u3 += rho * 0.5 * (u0 * u0 * u0 + u1 * u1 * u1) * in;
    }
  }
  I.bd_rate = f.bd_rate;
  I.diss = f.dissipation_rate;
  const double rb = s.rho.back(), b = s.b();
  I.bnd = law.P(rb) * law.dP(rb) * b * b * b / 3;
  return I;
}

double boundary_C(const PressureLaw& law, double rho0) {
  if (law.kind() == LawKind::Polytropic) return law.params().kappa;
  double C = 0;
  const double g1 = law.gamma1();
  for (int i = 0; i <= 400; ++i) {
    const double rho = rho0 * std::pow(10.0, -12.0 * i / 400);
    C = std::max(C, law.P(rho) / std::pow(rho, g1));
  }
  return C;
}

}  // namespace

RunResult run(const SolverSpec& spec, const PressureLaw& law, const OutputPolicy& out) {
  return run_from(spec, law, build_initial_data(spec, law), out);
}

RunResult run_from(const SolverSpec& spec, const PressureLaw& law, InitialData init, const OutputPolicy& out) {
  check_spec(spec, law);
  RunResult res;
  res.init = std::move(init);
  RadialState s = res.init.state;
  const double M = s.mass(), eps = s.eps, T = spec.T, b0 = s.b();
  const double d = spec.d, D = spec.D > 0 ? spec.D : 0.8 * b0;
  const double E0 = res.init.E0;
  const double rho0b = s.rho.back(), g1 = law.gamma1();
  res.C_tilde = boundary_C(law, rho0b);
  auto lower = [&](double t) {
    return rho0b * std::pow(1 + res.C_tilde * (g1 - 1) / eps * std::pow(rho0b, g1 - 1) * t, -1 / (g1 - 1));
  };

  std::vector<double> times;
  const int K = std::max(1, out.snapshots);
  times.push_back(0.0);
  for (int k = 0; k < K; ++k) times.push_back(out.uniform ? T * (k + 1) / K : T * std::pow(2.0, -(K - 1 - k)));

  EnergyFunctionals f = energy_functionals(s, law);
  Integrands I = integrands(s, law, f, d, D);
  const double Etot0 = f.E_kin + f.E_int - f.E_grav;
  const double Es0 = f.E_kin + f.E_int - f.W_scheme;
  double diss = 0, work = 0, acc_rhoP = 0, acc_u3 = 0, acc_g2 = 0, acc_bd = 0, acc_bnd = 0, acc_rho_u2 = 0;
  double dt = stable_dt(s, law, spec.cfl);
  double bint = b0;

  auto record = [&](double dt_used, bool keep) {
    LedgerRow row;
    row.tau = s.tau;
    row.mass = s.mass();
    row.E_kinetic = f.E_kin;
    row.E_internal = f.E_int;
    row.E_grav = f.E_grav;
    row.E_total = f.E_kin + f.E_int - f.E_grav;
    row.E_total_plus = f.E_kin + f.E_int + f.E_grav;
    row.rho_boundary = s.rho.back();
    row.b = s.b();
    row.dt = dt_used;
    row.acc_rhoP = acc_rhoP;
    row.acc_u3 = acc_u3;
    row.acc_rho_g2 = acc_g2;
    row.dissipation = diss;
    row.residual = row.E_total - Etot0 + diss;
    row.residual_scheme = f.E_kin + f.E_int - f.W_scheme - Es0 + work;
    row.sobolev = sobolev_check(s);
    row.rho_lower = lower(s.tau);
    row.BD = f.bd_grad + eps * acc_bd + f.bd_boundary + acc_bnd / eps;
    row.bound_energy = (f.E_kin + f.E_int) / kOmega3 + eps * acc_rho_u2 + std::sqrt(f.grad_phi_sq) + f.phi_L6 + f.W;
    row.bound_bd = f.bd_grad + eps * acc_bd;
    row.bound_energy_plain = (f.E_kin + f.E_int + diss) / kOmega3;

    res.max_mass_drift = std::max(res.max_mass_drift, std::fabs(row.mass - M) / M);
    res.max_residual = std::max(res.max_residual, std::fabs(row.residual) / E0);
    res.max_residual_scheme = std::max(res.max_residual_scheme, std::fabs(row.residual_scheme) / E0);
    res.min_b_ratio = std::min(res.min_b_ratio, row.b / b0);
    res.max_sobolev = std::max(res.max_sobolev, row.sobolev);
    res.bound_energy = std::max(res.bound_energy, row.bound_energy);
    res.bound_bd = std::max(res.bound_bd, row.bound_bd);
    res.bound_bd_full = std::max(res.bound_bd_full, row.BD);
    res.bound_energy_plain = std::max(res.bound_energy_plain, row.bound_energy_plain);
    if (keep) res.ledger.push_back(row);
  };

  record(0.0, true);
  res.min_lower_margin = s.rho.back() / lower(0) - 1;
  if (out.keep_snapshots) res.snapshots.push_back({0.0, s});
  std::size_t next = 1;

  try {
    while (next < times.size()) {
      if (res.steps >= spec.max_steps) throw NumericalError("step budget exhausted");
      const double limit = stable_dt(s, law, spec.cfl);
      dt = std::min(limit, dt * spec.dt_growth);
      bool hit = false;
      if (s.tau + dt >= times[next] * (1 - 1e-13)) {
        dt = times[next] - s.tau;
        hit = true;
      }
      const RadialState before = s;
      StepInfo info;
      int tries = 0;
      for (;;) {
        try {
          info = step(s, dt, law, spec.cfl);
        } catch (const BlowupError& e) {
          if (++tries > spec.max_rejections) throw;
          ++res.rejections;
          dt *= 0.5;
          hit = false;
          continue;
        }
        if (info.accepted) break;
        if (++tries > spec.max_rejections) throw NumericalError("CFL step rejected repeatedly");
        ++res.rejections;
        dt = std::min(0.5 * dt, info.dt_limit);
        hit = false;
      }
      ++res.steps;
      if (hit) s.tau = times[next];

      if (s.rho.back() > before.rho.back()) ++res.boundary_increases;
      bint += 0.5 * dt * (before.u.back() + s.u.back());
      work += kOmega3 * (info.visc_work + info.nc_work);

      const EnergyFunctionals fn = energy_functionals(s, law);
      const Integrands In = integrands(s, law, fn, d, D);
      acc_rhoP += 0.5 * dt * (I.rhoP + In.rhoP);
      acc_u3 += 0.5 * dt * (I.u3 + In.u3);
      acc_g2 += 0.5 * dt * (I.rho_g2 + In.rho_g2);
      acc_bd += 0.5 * dt * (I.bd_rate + In.bd_rate);
      acc_bnd += 0.5 * dt * (I.bnd + In.bnd);
      diss += 0.5 * dt * (I.diss + In.diss);
      acc_rho_u2 += 0.5 * dt * (f.rho_u2 + fn.rho_u2);
      f = fn;
      I = In;

      const bool snap = hit;
      record(dt, snap || res.steps % std::max(1, out.ledger_stride) == 0);
      if (snap) {
        res.min_lower_margin = std::min(res.min_lower_margin, s.rho.back() / lower(s.tau) - 1);
        if (out.keep_snapshots) res.snapshots.push_back({s.tau, s});
        ++next;
      }
    }
  } catch (const BlowupError& e) {
    res.failed = true;
    res.failure = e.what();
    res.failure_cell = e.cell;
  } catch (const NumericalError& e) {
    res.failed = true;
    res.failure = e.what();
  }
  if (res.failed && (res.ledger.empty() || res.ledger.back().tau != s.tau)) record(0.0, true);

  res.b_from_velocity = bint;
  res.bound_u3 = acc_u3;
  res.bound_rho_g2 = acc_g2;
  res.bound_rhoP = acc_rhoP;
  return res;
}

}  // namespace sg
