// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>

#include "critical_mass.hpp"

namespace sg {

namespace {

const double kOmega3 = surface_area(3);

// Enclosed mass x(r) = A + B r^3 inside cell j.
struct CellMass {
  double A, B;
};
CellMass cell_mass(const RadialState& s, int j) {
  const double r0 = s.r[j];
  return {j * s.dx - s.rho[j] * r0 * r0 * r0 / 3, s.rho[j] / 3};
}

// int_a^inf x^2 / r^2 dr, exact for piecewise-constant density.
double grav_integral(const RadialState& s) {
  double g = 0;
  for (int j = 0; j < s.N; ++j) {
    const auto [A, B] = cell_mass(s, j);
    const double r0 = s.r[j], r1 = s.r[j + 1], dr = r1 - r0;
    const double p4 = r1 * r1 * r1 * r1 + r1 * r1 * r1 * r0 + r1 * r1 * r0 * r0 + r1 * r0 * r0 * r0 + r0 * r0 * r0 * r0;
    g += A * A * dr / (r0 * r1) + A * B * (r1 + r0) * dr + B * B * dr * p4 / 5;
  }
  const double X = s.N * s.dx;
  return g + X * X / s.b();
}

}  // namespace

EnergyFunctionals energy_functionals(const RadialState& s, const PressureLaw& law) {
  EnergyFunctionals f;
  const int N = s.N;
  const double dx = s.dx, eps = s.eps, X = N * dx, b = s.b();

  double kin = 0, ru2 = 0, ws = 0;
  for (int e = 1; e <= N; ++e) {
    const double m = e == N ? 0.5 * dx : dx, u2 = s.u[e] * s.u[e];
    kin += 0.5 * m * u2;
    ru2 += m * u2;
    ws += m * e * dx / s.r[e];
  }
  double in = 0, w = 0;
  for (int j = 0; j < N; ++j) {
    in += law.e(s.rho[j]);
    const auto [A, B] = cell_mass(s, j);
    const double r0 = s.r[j], r1 = s.r[j + 1], dr = r1 - r0;
    const double p4 = r1 * r1 * r1 * r1 + r1 * r1 * r1 * r0 + r1 * r1 * r0 * r0 + r1 * r0 * r0 * r0 + r0 * r0 * r0 * r0;
    w += s.rho[j] * (0.5 * A * (r1 + r0) * dr + B * dr * p4 / 5);
  }
  const double g = grav_integral(s);
  f.E_kin = kOmega3 * kin;
  f.E_int = kOmega3 * dx * in;
  f.E_grav = 0.5 * kOmega3 * g;
  f.grad_phi_sq = kOmega3 * g;
  f.W = w;
  f.W_scheme = kOmega3 * ws;
  f.rho_u2 = ru2;

  // Phi from the exterior value -X/b inwards; |Phi|^6 r^2 by Gauss-Legendre in ln r per cell.
  double phi = -X / b, l6 = std::pow(X, 6) / (3 * b * b * b);
  for (int j = N - 1; j >= 0; --j) {
    const auto [A, B] = cell_mass(s, j);
    const double r1 = s.r[j + 1], phi1 = phi;
    auto Phi = [&](double r) { return phi1 - (A * (1 / r - 1 / r1) + B * (r1 * r1 - r * r) / 2); };
    l6 += boost::math::quadrature::gauss<double, 8>::integrate(
        [&](double t) {
          const double r = std::exp(t), p = Phi(r);
          return p * p * p * p * p * p * r * r * r;
        },
        std::log(s.r[j]), std::log(r1));
    phi = Phi(s.r[j]);
  }
  l6 += std::pow(phi, 6) * s.a * s.a * s.a / 3;
  f.phi_L6 = std::pow(kOmega3 * l6, 1.0 / 6);

  double bg = 0, br = 0;
  for (int e = 1; e < N; ++e) {
    const double dc = s.center(e) - s.center(e - 1), r2 = s.r[e] * s.r[e];
    const double sq = std::sqrt(s.rho[e]) - std::sqrt(s.rho[e - 1]), dr = s.rho[e] - s.rho[e - 1];
    const double rm = 0.5 * (s.rho[e] + s.rho[e - 1]);
    bg += sq * sq * r2 / dc;
    br += law.dP(rm) / rm * dr * dr * r2 / dc;
  }
  f.bd_grad = eps * eps * bg;
  f.bd_rate = br;
  f.bd_boundary = law.P(s.rho.back()) * b * b * b / 3;

  double diss = 0;
  for (int j = 0; j < N; ++j) {
    const double r0 = s.r[j], r1 = s.r[j + 1], ur = (s.u[j + 1] - s.u[j]) / (r1 - r0);
    diss += dx * (ur * ur + s.u[j] * s.u[j] / (r0 * r0) + s.u[j + 1] * s.u[j + 1] / (r1 * r1));
  }
  diss += 2 * s.rho.back() * s.u[N] * s.u[N] * b;
  f.dissipation_rate = kOmega3 * eps * diss;
  return f;
}

double sobolev_check(const RadialState& s) {
  double n = 0;
  for (int j = 0; j < s.N; ++j) n += std::pow(s.rho[j], 1.2) * s.volume(j);
  const double norm = std::pow(kOmega3 * n, 5.0 / 6);
  return kOmega3 * grav_integral(s) / (sobolev_A(3) * norm * norm);
}

double uniform_ball_egrav(double rho, double a, double R) {
  const double a3 = a * a * a, X = rho * (R * R * R - a3) / 3;
  const double in = (std::pow(R, 5) - std::pow(a, 5)) / 5 - a3 * (R * R - a * a) + a3 * a3 * (1 / a - 1 / R);
  return 0.5 * kOmega3 * (rho * rho / 9 * in + X * X / R);
}

namespace {

// rho and u sampled at radius r: rho is the cell value (cells can span decades
// of density on the plateau, so interpolating between centers invents mass),
// u is linear between edges; both vanish outside [a, b].
struct Sampler {
  const RadialState& s;
  explicit Sampler(const RadialState& st) : s(st) {}
  int cell(double r) const {
    return std::clamp(int(std::upper_bound(s.r.begin(), s.r.end(), r) - s.r.begin()) - 1, 0, s.N - 1);
  }
  double rho(double r) const {
    if (r > s.b() || r < s.a) return 0.0;
    return s.rho[cell(r)];
  }
  double u(double r) const {
    if (r > s.b() || r < s.a) return 0.0;
    const int e = cell(r);
    const double t = (r - s.r[e]) / (s.r[e + 1] - s.r[e]);
    return (1 - t) * s.u[e] + t * s.u[e + 1];
  }
  double x(double r) const {  // enclosed mass, exact for the piecewise-constant density
    if (r <= s.a) return 0.0;
    if (r >= s.b()) return s.N * s.dx;
    const int j = cell(r);
    const double r0 = s.r[j];
    return j * s.dx + s.rho[j] * (r * r * r - r0 * r0 * r0) / 3;
  }
};

double frame_l1(const RadialState& x, const RadialState& y, double d, double D, int points) {
  const Sampler sx(x), sy(y);
  const double h = (D - d) / (points - 1);
  double acc = 0;
  for (int i = 0; i < points; ++i) {
    const double r = d + i * h;
    const double rx = sx.rho(r), ry = sy.rho(r);
    const double v = (std::fabs(rx - ry) + std::fabs(rx * sx.u(r) - ry * sy.u(r))) * r * r;
    acc += (i == 0 || i == points - 1 ? 0.5 : 1.0) * v;
  }
  return acc * h;
}

}  // namespace

double window_l1(const RunResult& x, const RunResult& y, double d, double D, int points) {
  if (!(D > d && d > 0) || points < 2) throw ConfigError("window: need 0 < d < D and at least 2 points");
  std::vector<std::pair<double, double>> series;  // (time, distance)
  std::size_t j = 0;
  for (const auto& sx : x.snapshots) {
    while (j < y.snapshots.size() && y.snapshots[j].tau < sx.tau - 1e-12 * (1 + sx.tau)) ++j;
    if (j < y.snapshots.size() && std::fabs(y.snapshots[j].tau - sx.tau) <= 1e-12 * (1 + sx.tau))
      series.emplace_back(sx.tau, frame_l1(sx.state, y.snapshots[j].state, d, D, points));
  }
  if (series.empty()) throw ConfigError("window: runs share no snapshot times");
  if (series.size() == 1) return series[0].second;
  double acc = 0;
  for (std::size_t k = 1; k < series.size(); ++k)
    acc += 0.5 * (series[k].first - series[k - 1].first) * (series[k].second + series[k - 1].second);
  return acc / (series.back().first - series.front().first);
}

namespace {

SweepResult sweep(const SolverSpec& spec, const PressureLaw& law, const std::vector<double>& params, bool eps_axis,
                  const Window& w, const OutputPolicy& out) {
  if (params.size() < 2) throw ConfigError("sweep: need at least two parameter values");
  for (double p : params)
    if (!(p > 0)) throw ConfigError("sweep: parameters must be positive");
  const std::size_t n = params.size();
  std::vector<RunResult> runs(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      SolverSpec sp = spec;
      (eps_axis ? sp.eps : sp.b) = params[i];
      try {
        runs[i] = run(sp, law, out);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  SweepResult r;
  r.axis = eps_axis ? "eps" : "b";
  double bmin = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    SweepRun sr;
    sr.param = params[i];
    const RunResult& x = runs[i];
    sr.failed = !errors[i].empty() || x.failed;
    sr.failure = errors[i].empty() ? x.failure : errors[i];
    if (errors[i].empty()) {
      sr.final_b = x.ledger.back().b;
      sr.min_b = x.min_b_ratio * x.init.state.b();
      sr.max_mass_drift = x.max_mass_drift;
      sr.max_residual = x.max_residual;
      sr.bound_energy = x.bound_energy;
      sr.bound_bd = x.bound_bd;
      sr.bound_u3 = x.bound_u3;
      sr.bound_rho_g2 = x.bound_rho_g2;
      sr.bound_bd_full = x.bound_bd_full;
      sr.bound_rhoP = x.bound_rhoP;
      bmin = std::min(bmin, sr.min_b);
    }
    r.partial = r.partial || sr.failed;
    r.runs.push_back(sr);
  }
  r.d = w.d;
  r.D = w.D > 0 ? w.D : 0.8 * bmin;
  if (r.partial) return r;
  if (!(r.D > r.d)) throw ConfigError("sweep: window [d, D] is empty");

  r.diff.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) r.diff[i][j] = r.diff[j][i] = window_l1(runs[i], runs[j], r.d, r.D, w.points);
  for (std::size_t i = 0; i + 1 < n; ++i) r.consecutive.push_back(r.diff[i][i + 1]);
  r.monotone = true;
  for (std::size_t i = 0; i + 1 < r.consecutive.size(); ++i)
    if (r.consecutive[i + 1] > 1.1 * r.consecutive[i]) r.monotone = false;
  if (r.consecutive.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < r.consecutive.size(); ++i) {
      if (!(r.consecutive[i] > 0)) continue;
      const double lx = std::log(params[i]), ly = std::log(r.consecutive[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    if (m >= 2) r.rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  auto pick = [](const SweepRun& s, int k) {
    const double v[] = {s.bound_energy, s.bound_bd, s.bound_u3, s.bound_rho_g2, s.bound_bd_full, s.bound_rhoP};
    return v[k];
  };
  for (int k = 0; k < 6; ++k) {
    double mx = 0, mn = 1e300;
    for (const auto& s : r.runs) {
      mx = std::max(mx, pick(s, k));
      mn = std::min(mn, pick(s, k));
    }
    const double first = pick(r.runs.front(), k);
    r.growth.push_back(first > 0 ? mx / first : 0.0);
    r.spread.push_back(mn > 0 ? mx / mn : 0.0);
  }
  return r;
}

}  // namespace

SweepResult epsilon_sweep(const SolverSpec& spec, const PressureLaw& law, const std::vector<double>& eps_list,
                          const Window& w, const OutputPolicy& out) {
  return sweep(spec, law, eps_list, true, w, out);
}

SweepResult domain_sweep(const SolverSpec& spec, const PressureLaw& law, const std::vector<double>& b_list,
                         const Window& w, const OutputPolicy& out) {
  return sweep(spec, law, b_list, false, w, out);
}

PairFn mechanical_pair_fn(const PressureLaw& law) {
  return [law](double rho, double u) {
    PairValue v;
    if (rho <= 0) return v;
    const double e = law.e(rho), P = law.P(rho);
    v.eta = rho * (0.5 * u * u + e);
    v.q = rho * u * (0.5 * u * u + e) + P * u;
    v.eta_rho = -0.5 * u * u + e + P / rho;
    v.eta_m = u;
    return v;
  };
}

PairFn weak_pair_fn(EntropyKernel& K, const TestFunction& psi) {
  return [&K, psi](double rho, double u) {
    PairValue v;
    if (rho <= 0) return v;
    const auto p = weak_entropy_pair(K, psi, rho, u);
    v.eta = p.eta;
    v.q = p.q;
    const double m = rho * u, h = 1e-4 * rho, hm = 1e-4 * rho * (std::fabs(u) + K.law().k(rho));
    auto eta = [&](double r, double mm) { return weak_entropy_pair(K, psi, r, mm / r).eta; };
    v.eta_rho = (eta(rho + h, m) - eta(rho - h, m)) / (2 * h);
    v.eta_m = (eta(rho, m + hm) - eta(rho, m - hm)) / (2 * hm);
    return v;
  };
}

DissipationProbe entropy_dissipation_probe(const std::vector<Snapshot>& traj, const PairFn& pair, double d, double D,
                                           int points) {
  if (traj.size() < 2) throw ConfigError("probe: need at least two frames");
  if (!(D > d && d > 0) || points < 5) throw ConfigError("probe: need 0 < d < D and at least 5 points");
  const double h = (D - d) / (points - 1);
  auto phi = [&](double r) {
    const double s = (2 * r - d - D) / (D - d), q = 1 - s * s;
    return q * q * q;
  };
  auto dphi = [&](double r) {
    const double s = (2 * r - d - D) / (D - d), q = 1 - s * s;
    return -6 * s * q * q * 2 / (D - d);
  };
  struct Frame {
    double t, A, Q, G, Gr, V;
  };
  std::vector<Frame> fr;
  for (const auto& snap : traj) {
    const Sampler sm(snap.state);
    const double eps = snap.state.eps;
    std::vector<double> rr(points), rho(points), u(points);
    for (int i = 0; i < points; ++i) {
      rr[i] = d + i * h;
      rho[i] = sm.rho(rr[i]);
      u[i] = sm.u(rr[i]);
    }
    auto deriv = [&](const std::vector<double>& f, int i) {
      if (i == 0) return (f[1] - f[0]) / h;
      if (i == points - 1) return (f[i] - f[i - 1]) / h;
      return (f[i + 1] - f[i - 1]) / (2 * h);
    };
    std::vector<double> flux(points);  // rho (u_r + 2u/r)
    for (int i = 0; i < points; ++i) flux[i] = rho[i] * (deriv(u, i) + 2 * u[i] / rr[i]);
    Frame f{snap.tau, 0, 0, 0, 0, 0};
    for (int i = 0; i < points; ++i) {
      const double r = rr[i], wq = (i == 0 || i == points - 1 ? 0.5 : 1.0) * h;
      const PairValue p = pair(rho[i], u[i]);
      const double m = rho[i] * u[i];
      const double visc = deriv(flux, i) - 2 * deriv(rho, i) * u[i] / r;
      f.A += wq * r * r * p.eta * phi(r);
      f.Q += wq * r * r * p.q * dphi(r);
      f.G += wq * phi(r) * 2 * r * (p.q - m * p.eta_rho - m * u[i] * p.eta_m);
      f.Gr += wq * phi(r) * (-rho[i] * sm.x(r) * p.eta_m);
      f.V += wq * phi(r) * eps * r * r * p.eta_m * visc;
    }
    fr.push_back(f);
  }
  DissipationProbe out;
  out.divergence = fr.back().A - fr.front().A;
  for (std::size_t k = 1; k < fr.size(); ++k) {
    const double dt = 0.5 * (fr[k].t - fr[k - 1].t);
    out.divergence -= dt * (fr[k].Q + fr[k - 1].Q);
    out.I_geom += dt * (fr[k].G + fr[k - 1].G);
    out.I_grav += dt * (fr[k].Gr + fr[k - 1].Gr);
    out.I_visc += dt * (fr[k].V + fr[k - 1].V);
  }
  out.scale = std::max({std::fabs(out.divergence), std::fabs(out.I_geom), std::fabs(out.I_grav), std::fabs(out.I_visc)});
  out.residual = out.scale > 0 ? std::fabs(out.divergence - out.I_geom - out.I_grav - out.I_visc) / out.scale : 0.0;
  return out;
}

}  // namespace sg
