// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "goursat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sg {

namespace {

struct Level {
  double rho, dk, c, E, Vb, Vb2, Q;  // E = rho k^2/2 + rho e; Vb, Vb2 = V1, V2 on u = k; Q = q on the cone edge
};

Level level_at(const PressureLaw& law, double kappa) {
  Level L{};
  if (kappa <= 0.0) return L;
  L.rho = law.k_inverse(kappa);
  const double rho = L.rho, e = law.e(rho), pr = law.P(rho) / rho;
  L.dk = law.dk(rho);
  L.c = (law.d(rho) - 2.0) / (4.0 * law.sound_speed(rho));
  L.E = 0.5 * rho * kappa * kappa + rho * e;
  const double a = (0.5 * kappa * kappa + e + pr) / (2.0 * L.dk);
  L.Vb = a + 0.5 * rho * kappa;
  L.Vb2 = a - 0.5 * rho * kappa;
  L.Q = 0.5 * rho * kappa * kappa * kappa + rho * kappa * (e + pr);
  return L;
}

double fit_log_ratio(const std::vector<double>& d) {
  // least-squares slope of ln(delta) against sweep index
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (!(d[k] > 1e-14)) continue;
    const double x = double(k), y = std::log(d[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) return d.size() >= 2 && d[0] > 0 ? d.back() / d.front() : 0.0;
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

double slope_order(const std::vector<int>& N, const std::vector<double>& v) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < N.size(); ++k) {
    if (!(v[k] > 0)) continue;
    const double x = std::log(double(N[k])), y = std::log(v[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::pair<std::pair<double, double>, std::pair<double, double>> characteristics_through(const PressureLaw& law,
                                                                                         double rho, double u) {
  const double kv = law.k(rho);
  if (std::fabs(u) > kv * (1 + 1e-15)) throw DomainError("characteristics_through: |u| > k(rho)");
  const double u1 = 0.5 * (kv + u), u2 = 0.5 * (u - kv);
  return {{law.k_inverse(std::max(u1, 0.0)), u1}, {law.k_inverse(std::max(-u2, 0.0)), u2}};
}

GoursatField solve_goursat(const PressureLaw& law, const GoursatOptions& opt) {
  if (!(opt.tol > 0.0)) throw DomainError("solve_goursat: tol must be > 0");
  if (opt.N < 8) throw DomainError("solve_goursat: N must be >= 8");
  GoursatField f;
  f.rho_max = opt.rho_max > 0.0 ? opt.rho_max : 10.0 * law.rho_hi();
  f.N = opt.N;
  f.side = opt.N + 3;
  f.kappa_max = law.k(f.rho_max);
  f.h = 2.0 * f.kappa_max / opt.N;
  const int side = f.side, smax = opt.N + 2;
  const double h = f.h;

  std::vector<Level> lev(smax + 1);
  for (int s = 0; s <= smax; ++s) lev[s] = level_at(law, 0.5 * s * h);
  f.lev_rho.resize(smax + 1);
  f.lev_dk.resize(smax + 1);
  f.lev_c.resize(smax + 1);
  for (int s = 0; s <= smax; ++s) {
    f.lev_rho[s] = lev[s].rho;
    f.lev_dk[s] = lev[s].dk;
    f.lev_c[s] = lev[s].c;
  }

  // Near the vacuum vertex c ~ C0/kappa, and the trapezoid self-weight h|c|/2 = |C0|/s can reach 1,
  // which makes the discrete fixed point singular. Such cells use the left-endpoint rule instead.
  std::vector<char> expl(smax + 1, 0);
  for (int s = 1; s <= smax; ++s) {
    expl[s] = 0.5 * h * std::fabs(lev[s].c) > 0.25;
    if (expl[s]) f.explicit_levels = s;
  }

  const std::size_t n = std::size_t(side) * side;
  f.V1.assign(n, 0.0);
  f.V2.assign(n, 0.0);
  for (int i = 0; i <= smax; ++i)
    for (int j = 0; i + j <= smax; ++j) {
      f.V1[f.idx(i, j)] = lev[i].Vb;
      f.V2[f.idx(i, j)] = -lev[j].Vb;
    }

  std::vector<double> S(n, 0.0), N1(n, 0.0), N2(n, 0.0);
  bool converged = false;
  for (int it = 0; it < opt.max_iter; ++it) {
    for (int i = 0; i <= smax; ++i)
      for (int j = 0; i + j <= smax; ++j) {
        const std::size_t id = f.idx(i, j);
        S[id] = i + j == 0 ? 0.0 : lev[i + j].c * (f.V1[id] + f.V2[id]);
      }
    double dmax = 0.0, vmax = 0.0;
    // V1 transported along beta at fixed alpha
    for (int i = 0; i <= smax; ++i) {
      double acc = 0.0;
      N1[f.idx(i, 0)] = lev[i].Vb;
      for (int j = 1; i + j <= smax; ++j) {
        acc += expl[i + j] ? h * S[f.idx(i, j - 1)] : 0.5 * h * (S[f.idx(i, j - 1)] + S[f.idx(i, j)]);
        N1[f.idx(i, j)] = lev[i].Vb - acc;
      }
    }
    // V2 transported along alpha at fixed beta
    for (int j = 0; j <= smax; ++j) {
      double acc = 0.0;
      N2[f.idx(0, j)] = -lev[j].Vb;
      for (int i = 1; i + j <= smax; ++i) {
        acc += expl[i + j] ? h * S[f.idx(i - 1, j)] : 0.5 * h * (S[f.idx(i - 1, j)] + S[f.idx(i, j)]);
        N2[f.idx(i, j)] = -lev[j].Vb - acc;
      }
    }
    for (int i = 0; i <= smax; ++i)
      for (int j = 0; i + j <= smax; ++j) {
        const std::size_t id = f.idx(i, j);
        dmax = std::max({dmax, std::fabs(N1[id] - f.V1[id]), std::fabs(N2[id] - f.V2[id])});
        vmax = std::max({vmax, std::fabs(N1[id]), std::fabs(N2[id])});
      }
    f.V1.swap(N1);
    f.V2.swap(N2);
    const double rel = vmax > 0 ? dmax / vmax : 0.0;
    f.deltas.push_back(rel);
    f.iterations = it + 1;
    if (!std::isfinite(rel)) throw NumericalError("solve_goursat: iteration produced non-finite values");
    if (rel <= opt.tol) {
      converged = true;
      break;
    }
  }
  f.fitted_ratio = fit_log_ratio(f.deltas);
  if (!converged)
    throw NumericalError("solve_goursat: no convergence after " + std::to_string(opt.max_iter) +
                         " sweeps, observed contraction ratio " + std::to_string(f.fitted_ratio));

  // eta and q along constant-u diagonals from the cone edge (or the vertex) inward
  f.eta.assign(n, 0.0);
  f.q.assign(n, 0.0);
  for (int m = -smax; m <= smax; ++m) {
    int i = std::max(m, 0), j = std::max(-m, 0);
    const int s0 = i + j;
    const double sign = m > 0 ? 1.0 : (m < 0 ? -1.0 : 0.0);
    double eta = sign * lev[s0].E, q = s0 > 0 ? lev[s0].Q : 0.0;
    const double u = 0.5 * m * h;
    auto G = [&](int a, int b) {
      const std::size_t id = f.idx(a, b);
      const Level& L = lev[a + b];
      return u * (f.V1[id] + f.V2[id]) + L.rho * L.dk * (f.V1[id] - f.V2[id]);
    };
    f.eta[f.idx(i, j)] = eta;
    f.q[f.idx(i, j)] = q;
    while (i + j + 2 <= smax) {
      const std::size_t a = f.idx(i, j), b = f.idx(i + 1, j + 1);
      eta += 0.5 * h * (f.V1[a] + f.V2[a] + f.V1[b] + f.V2[b]);
      q += 0.5 * h * (G(i, j) + G(i + 1, j + 1));
      ++i;
      ++j;
      f.eta[b] = eta;
      f.q[b] = q;
    }
  }
  return f;
}

namespace {

struct Bilinear {
  std::size_t i00, i10, i01, i11;
  double w00, w10, w01, w11;
};

Bilinear locate(const GoursatField& f, double kappa, double u) {
  const double a = (u + kappa) / f.h, b = (kappa - u) / f.h;
  int i = std::max(0, int(std::floor(a))), j = std::max(0, int(std::floor(b)));
  while (i + j > f.N) {
    if (i > j) --i; else --j;
  }
  const double ta = std::clamp(a - i, 0.0, 1.0), tb = std::clamp(b - j, 0.0, 1.0);
  return {f.idx(i, j), f.idx(i + 1, j), f.idx(i, j + 1), f.idx(i + 1, j + 1),
          (1 - ta) * (1 - tb), ta * (1 - tb), (1 - ta) * tb, ta * tb};
}

double interp(const std::vector<double>& v, const Bilinear& B) {
  return B.w00 * v[B.i00] + B.w10 * v[B.i10] + B.w01 * v[B.i01] + B.w11 * v[B.i11];
}

}  // namespace

SpecialValue special_entropy(const GoursatField& f, const PressureLaw& law, double rho, double u) {
  if (!(rho >= 0.0)) throw DomainError("special_entropy: density must be >= 0");
  SpecialValue out;
  const double kappa = law.k(rho);
  if (std::fabs(u) >= kappa) {
    out.exterior = true;
    const double s = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    const double e = law.e(rho), pr = rho > 0 ? law.P(rho) / rho : 0.0;
    out.eta = s * (0.5 * rho * u * u + rho * e);
    out.eta_rho = s * (0.5 * u * u + e + pr);
    out.eta_u = s * rho * u;
    out.eta_m = s * u;
    out.eta_rho_m = s * (-0.5 * u * u + e + pr);
    return out;
  }
  if (kappa > f.kappa_max * (1 + 1e-12)) throw DomainError("special_entropy: density beyond the solved range");
  const Bilinear B = locate(f, kappa, u);
  out.eta = interp(f.eta, B);
  const double v1 = interp(f.V1, B), v2 = interp(f.V2, B);
  out.eta_rho = law.dk(rho) * (v1 + v2);
  out.eta_u = v1 - v2;
  out.eta_m = out.eta_u / rho;
  out.eta_rho_m = out.eta_rho - u / rho * out.eta_u;
  return out;
}

double special_flux(const GoursatField& f, const PressureLaw& law, double rho, double u) {
  if (!(rho >= 0.0)) throw DomainError("special_flux: density must be >= 0");
  const double kappa = law.k(rho);
  if (std::fabs(u) >= kappa) {
    const double s = u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    const double e = law.e(rho), pr = rho > 0 ? law.P(rho) / rho : 0.0;
    return 0.5 * rho * std::fabs(u) * u * u + s * rho * u * (e + pr);
  }
  if (kappa > f.kappa_max * (1 + 1e-12)) throw DomainError("special_flux: density beyond the solved range");
  return interp(f.q, locate(f, kappa, u));
}

SpecialEntropy::SpecialEntropy(const PressureLaw& law, GoursatOptions opt) : law_(law), opt_(opt) {}

std::shared_ptr<const GoursatField> SpecialEntropy::ensure(double rho) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!field_) field_ = std::make_shared<const GoursatField>(solve_goursat(law_, opt_));
  if (rho > field_->rho_max) {
    GoursatOptions o = opt_;
    o.rho_max = 2.0 * rho;
    field_ = std::make_shared<const GoursatField>(solve_goursat(law_, o));
  }
  return field_;
}

SpecialValue SpecialEntropy::entropy(double rho, double u) {
  auto f = ensure(rho);
  return special_entropy(*f, law_, rho, u);
}

double SpecialEntropy::flux(double rho, double u) {
  auto f = ensure(rho);
  return special_flux(*f, law_, rho, u);
}

std::shared_ptr<const GoursatField> SpecialEntropy::field() { return ensure(0.0); }

// --- diagnostics -----------------------------------------------------------

double goursat_residual(const GoursatField& f, double lo_frac, double hi_frac) {
  // eta_ab + c (eta_a + eta_b) = 0, equivalent to eta_rr - k'^2 eta_uu = 0 scaled by 1/(4 k'^2)
  const double h = f.h;
  double r2 = 0, n2 = 0;
  for (int i = 1; i <= f.N; ++i)
    for (int j = 1; i + j <= f.N; ++j) {
      const double kappa = 0.5 * (i + j) * h;
      if (kappa < lo_frac * f.kappa_max || kappa > hi_frac * f.kappa_max) continue;
      const auto E = [&](int a, int b) { return f.eta[f.idx(a, b)]; };
      const double eab = (E(i + 1, j + 1) - E(i + 1, j - 1) - E(i - 1, j + 1) + E(i - 1, j - 1)) / (4 * h * h);
      const double ea = (E(i + 1, j) - E(i - 1, j)) / (2 * h), eb = (E(i, j + 1) - E(i, j - 1)) / (2 * h);
      const double t = f.lev_c[i + j] * (ea + eb);
      r2 += (eab + t) * (eab + t);
      n2 += t * t;
    }
  return n2 > 0 ? std::sqrt(r2 / n2) : 0.0;
}

double goursat_flux_residual(const GoursatField& f, double lo_frac, double hi_frac) {
  // q_u - (rho eta_rho + u eta_u) along constant-kappa lines
  const double h = f.h;
  double r2 = 0, n2 = 0;
  for (int i = 1; i <= f.N; ++i)
    for (int j = 1; i + j <= f.N; ++j) {
      const int s = i + j;
      const double kappa = 0.5 * s * h;
      if (kappa < lo_frac * f.kappa_max || kappa > hi_frac * f.kappa_max) continue;
      const double u = 0.5 * (i - j) * h, rho = f.lev_rho[s];
      const std::size_t id = f.idx(i, j);
      const double qu = (f.q[f.idx(i + 1, j - 1)] - f.q[f.idx(i - 1, j + 1)]) / (2 * h);
      const double a = rho * f.lev_dk[s] * (f.V1[id] + f.V2[id]), b = u * (f.V1[id] - f.V2[id]);
      r2 += (qu - a - b) * (qu - a - b);
      n2 += (std::fabs(a) + std::fabs(b)) * (std::fabs(a) + std::fabs(b));
    }
  return n2 > 0 ? std::sqrt(r2 / n2) : 0.0;
}

double goursat_cross_route(const GoursatField& f, const PressureLaw& law, double lo_frac, double hi_frac) {
  double worst = 0.0;
  for (int s = 1; s <= f.N; ++s) {
    const double kappa = 0.5 * s * f.h;
    if (kappa < lo_frac * f.kappa_max || kappa > hi_frac * f.kappa_max) continue;
    double acc = 0.0;
    for (int t = 0; t <= s; ++t) {
      const std::size_t id = f.idx(t, s - t);
      const double w = (t == 0 || t == s) ? 0.5 : 1.0;
      acc += w * (f.V1[id] - f.V2[id]);
    }
    acc *= f.h;
    const double rho = f.lev_rho[s];
    const double jump = 2.0 * (0.5 * rho * kappa * kappa + rho * law.e(rho));
    worst = std::max(worst, std::fabs(acc - jump) / jump);
  }
  return worst;
}

GoursatBoundFits goursat_bound_fits(const GoursatField& f, const PressureLaw& law) {
  GoursatBoundFits b;
  const double h = f.h;
  auto upd = [](double& C, double num, double den) {
    if (den > 0 && std::isfinite(num / den)) C = std::max(C, std::fabs(num) / den);
  };
  for (int i = 0; i <= f.N; ++i)
    for (int j = 0; i + j <= f.N; ++j) {
      const int s = i + j;
      if (s == 0) continue;
      const double rho = f.lev_rho[s], u = 0.5 * (i - j) * h, au = std::fabs(u);
      const double g = law.gamma_of(rho), th = 0.5 * (g - 1);
      const std::size_t id = f.idx(i, j);
      const double V = f.V1[id] + f.V2[id], D = f.V1[id] - f.V2[id];
      const double rg = std::pow(rho, g), rth = std::pow(rho, th);
      upd(b.C_eta, f.eta[id], rho * u * u + rg);
      upd(b.C_eta_rho, f.lev_dk[s] * V, u * u + rth * rth);
      upd(b.C_eta_u, D, rho * au + rth * rho);
      upd(b.C_eta_m, D / rho, au + rth);
      upd(b.C_q, f.q[id], rg * rth);
      upd(b.C_q_ueta, f.q[id] - u * f.eta[id], rg * au + rg * rth);
      if (i >= 1 && j >= 1 && s >= 4) {
        const auto Dm = [&](int a, int c) {
          const std::size_t k = f.idx(a, c);
          return (f.V1[k] - f.V2[k]) / f.lev_rho[a + c];
        };
        const double emu = (Dm(i + 1, j - 1) - Dm(i - 1, j + 1)) / (2 * h);
        const double emr = f.lev_dk[s] * (Dm(i + 1, j + 1) - Dm(i - 1, j - 1)) / (2 * h);
        upd(b.C_eta_mu, emu, 1.0);
        upd(b.C_eta_mrho, emr, std::pow(rho, th - 1));
      }
    }
  return b;
}

GoursatDiagnostics goursat_diagnostics(const PressureLaw& law, const GoursatOptions& opt) {
  GoursatDiagnostics d;
  const GoursatField f = solve_goursat(law, opt);
  d.N = f.N;
  d.iterations = f.iterations;
  d.explicit_levels = f.explicit_levels;
  d.fitted_ratio = f.fitted_ratio;
  d.last_delta = f.deltas.back();
  d.theta_ratio_predicted = law.nu() / (1 + law.theta1());

  double vmax = 0;
  for (std::size_t k = 0; k < f.V1.size(); ++k) vmax = std::max({vmax, std::fabs(f.V1[k]), std::fabs(f.V2[k])});
  for (int s = 1; s <= f.N; ++s) {
    const Level L = level_at(law, 0.5 * s * f.h);
    // boundary data: u = +k at (s, 0), u = -k at (0, s)
    d.boundary_error = std::max(d.boundary_error, std::fabs(f.eta[f.idx(s, 0)] - L.E) / std::max(L.E, 1e-300));
    d.boundary_error = std::max(d.boundary_error, std::fabs(f.eta[f.idx(0, s)] + L.E) / std::max(L.E, 1e-300));
    d.c1_mismatch = std::max(d.c1_mismatch, std::fabs(f.V2[f.idx(s, 0)] - L.Vb2) / vmax);
  }
  for (int i = 0; i <= f.N; ++i)
    for (int j = 0; i + j <= f.N; ++j)
      d.oddness_error = std::max(d.oddness_error, std::fabs(f.V1[f.idx(i, j)] + f.V2[f.idx(j, i)]) / vmax);
  d.cross_route_error = goursat_cross_route(f, law, 0.05, 0.9);

  // exterior closed forms on a deterministic sample
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  d.exterior_q_min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const double rho = std::pow(10.0, -6 + 9 * U(rng));
    const double kv = law.k(rho);
    const double u = (U(rng) < 0.5 ? -1 : 1) * kv * (1 + 3 * U(rng));
    const SpecialValue v = special_entropy(f, law, rho, u);
    const double q = special_flux(f, law, rho, u);
    const double scale = std::fabs(q) + std::fabs(rho * u * v.eta_rho_m) + std::fabs(rho * u * u * v.eta_m);
    d.exterior_dissipation = std::max(d.exterior_dissipation, std::fabs(-q + rho * u * v.eta_rho_m + rho * u * u * v.eta_m) / scale);
    d.exterior_q_min_margin = std::min(d.exterior_q_min_margin, (q - 0.5 * rho * std::fabs(u) * u * u) / std::fabs(q));
  }

  for (int div : {8, 4, 2}) {
    GoursatOptions o = opt;
    o.N = opt.N / div;
    o.rho_max = f.rho_max;
    const GoursatField g = solve_goursat(law, o);
    d.res_N.push_back(o.N);
    d.residual.push_back(goursat_residual(g, 0.05, 0.9));
    d.flux_residual.push_back(goursat_flux_residual(g, 0.05, 0.9));
    d.cross_route.push_back(goursat_cross_route(g, law, 0.05, 0.9));
    if (div == 2) d.fit_coarse = goursat_bound_fits(g, law);
  }
  d.residual_order = slope_order(d.res_N, d.residual);
  d.flux_order = slope_order(d.res_N, d.flux_residual);
  d.cross_route_order = slope_order(d.res_N, d.cross_route);
  d.fit_fine = goursat_bound_fits(f, law);
  const auto& a = d.fit_coarse;
  const auto& b = d.fit_fine;
  for (auto [x, y] : {std::pair{a.C_eta, b.C_eta}, {a.C_eta_rho, b.C_eta_rho}, {a.C_eta_u, b.C_eta_u},
                      {a.C_eta_m, b.C_eta_m}, {a.C_eta_mu, b.C_eta_mu}, {a.C_eta_mrho, b.C_eta_mrho},
                      {a.C_q, b.C_q}, {a.C_q_ueta, b.C_q_ueta}}) {
    if (!(std::isfinite(x) && std::isfinite(y) && x > 0 && y > 0)) {
      d.fit_max_change = std::numeric_limits<double>::infinity();
      continue;
    }
    d.fit_max_change = std::max(d.fit_max_change, std::fabs(y - x) / x);
  }
  return d;
}

}  // namespace sg
