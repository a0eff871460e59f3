// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "errors.hpp"

namespace sg {

namespace {

const double kPi = boost::math::constants::pi<double>();

// Richardson-extrapolated central difference
template <class F>
double diff(F&& f, double x) {
  const double h = 1e-3 * x;
  const double d1 = (f(x + h) - f(x - h)) / (2 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4 * d2 - d1) / 3;
}

// int_0^rho f(s) ds via s = rho e^-t; integrands here decay like s^((gamma1-1)/2)
template <class F>
double integrate_to(F&& f, double rho) {
  auto g = [&](double t) {
    const double s = rho * std::exp(-t);
    return f(s) * s;
  };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 46.0, 8, 1e-10);
}

}  // namespace

double kernel_B(double lambda) {
  if (!(lambda > 0)) throw DomainError("kernel_B: lambda must be > 0");
  // z = sin t removes the endpoint singularity
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double t) { return std::pow(std::cos(t), 2 * lambda + 1); }, -kPi / 2, kPi / 2);
}

double kernel_M(double lambda) { return 1.0 / (2 * lambda / std::sqrt(2 * lambda + 1) * kernel_B(lambda)); }

KernelCoefficients::KernelCoefficients(const PressureLaw& law) : law_(law) {
  lambda_ = law.lambda1();
  M_ = kernel_M(lambda_);
  const double th = law.theta1();
  const double c1 = std::sqrt(law.kappa1() * law.gamma1()) / th;
  norm_ = std::pow(c1, -lambda_ - 0.5) * std::sqrt(th) / kernel_B(lambda_);
}

double KernelCoefficients::a1(double rho) const {
  return norm_ * std::pow(law_.k(rho), -lambda_) / std::sqrt(law_.dk(rho));
}

double KernelCoefficients::b1(double rho) const {
  return norm_ * rho * std::pow(law_.k(rho), -lambda_ - 1) * std::sqrt(law_.dk(rho));
}

double KernelCoefficients::da1(double rho) const {
  const double k = law_.k(rho), k1 = law_.dk(rho), k2 = law_.d2k(rho);
  return norm_ * (-lambda_ * std::pow(k, -lambda_ - 1) * std::sqrt(k1) - 0.5 * std::pow(k, -lambda_) * std::pow(k1, -1.5) * k2);
}

double KernelCoefficients::db1(double rho) const {
  const double k = law_.k(rho), k1 = law_.dk(rho), k2 = law_.d2k(rho);
  return norm_ * (std::pow(k, -lambda_ - 1) * std::sqrt(k1) - (lambda_ + 1) * rho * std::pow(k, -lambda_ - 2) * std::pow(k1, 1.5) +
                  0.5 * rho * std::pow(k, -lambda_ - 1) * k2 / std::sqrt(k1));
}

double KernelCoefficients::d2a1(double rho) const {
  return diff([this](double x) { return da1(x); }, rho);
}

double KernelCoefficients::d2b1(double rho) const {
  return diff([this](double x) { return db1(x); }, rho);
}

double KernelCoefficients::a2(double rho) const {
  if (law_.kind() == LawKind::Polytropic || rho <= 0) return 0.0;
  const double L = lambda_;
  const double I1 = integrate_to([&](double s) { return std::pow(law_.k(s), L) / std::sqrt(law_.dk(s)) * d2a1(s); }, rho);
  return -1.0 / (4 * (L + 1)) * std::pow(law_.k(rho), -L - 1) / std::sqrt(law_.dk(rho)) * I1;
}

double KernelCoefficients::b2(double rho) const {
  if (law_.kind() == LawKind::Polytropic || rho <= 0) return 0.0;
  const double L = lambda_;
  const double I1 = integrate_to([&](double s) { return std::pow(law_.k(s), L) / std::sqrt(law_.dk(s)) * d2a1(s); }, rho);
  const double I2 = integrate_to([&](double s) { return std::pow(law_.k(s), L + 1) / std::sqrt(law_.dk(s)) * d2b1(s); }, rho);
  const double I3 = integrate_to([&](double s) { return s * std::pow(law_.k(s), L) * std::sqrt(law_.dk(s)) * d2a1(s); }, rho);
  const double k = law_.k(rho), k1 = law_.dk(rho);
  const double kk = std::pow(k, -L - 2);
  return -1.0 / (4 * (L + 1)) * (rho * std::sqrt(k1) * kk * I1 + kk / std::sqrt(k1) * (I2 - I3));
}

double KernelCoefficients::D(double rho) const {
  const double A1 = a1(rho), B1 = b1(rho), k = law_.k(rho);
  return A1 * B1 - 2 * k * k * (A1 * b2(rho) - a2(rho) * B1);
}

double chi_closed_form(const PressureLaw& law, double rho, double v) {
  if (law.kind() != LawKind::Polytropic) throw NotApplicable("chi_closed_form: polytropic laws only");
  if (!(rho >= 0)) throw DomainError("chi_closed_form: density must be >= 0");
  if (rho == 0) return 0.0;
  const double k = law.k(rho), G = k * k - v * v;
  if (G <= 0) return 0.0;
  const double th = law.theta1(), lam = law.lambda1();
  const double B = std::tgamma(lam + 1) * std::sqrt(kPi) / std::tgamma(lam + 1.5);
  const double c1 = std::sqrt(law.kappa1() * law.gamma1()) / th;
  const double a1 = std::pow(c1, -lam - 0.5) * std::sqrt(th) / B * std::pow(k, -lam) / std::sqrt(law.dk(rho));
  return a1 * std::pow(G, law.lambda1());
}

double sigma_minus_u_chi_closed(const PressureLaw& law, double rho, double v) {
  return -law.theta1() * v * chi_closed_form(law, rho, v);
}

// --- representation-formula grid -------------------------------------------

namespace {

// Local polytrope with exponent theta = rho k'/k and unit-mass normalization; chi or h = -theta v chi.
double local_start(const PressureLaw& law, double rho, double v, bool is_h) {
  const double kv = law.k(rho);
  if (std::fabs(v) >= kv) return 0.0;
  const double th = rho * law.dk(rho) / kv;
  const double lam = (1 - th) / (2 * th);
  const double z = v / kv;
  const double c = rho / (kv * std::sqrt(M_PI) * std::tgamma(lam + 1) / std::tgamma(lam + 1.5)) *
                   std::pow(1 - z * z, lam);
  return is_h ? -th * v * c : c;
}

}  // namespace

KernelGrid solve_kernel(const PressureLaw& law, const KernelOptions& opt) {
  if (opt.N < 8) throw DomainError("solve_kernel: N must be >= 8");
  if (!(opt.tol > 0)) throw DomainError("solve_kernel: tol must be > 0");
  KernelGrid g;
  g.N = opt.N;
  g.width = 2 * g.N + 1;
  g.rho_max = opt.rho_max > 0 ? opt.rho_max : 100.0 * law.rho_hi();
  g.dk = law.k(g.rho_max) / g.N;
  const int N = g.N;

  g.rho.assign(N + 1, 0.0);
  g.dkdr.assign(N + 1, 0.0);
  g.dtilde.assign(N + 1, 0.0);
  std::vector<double> src(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    g.rho[n] = n == N ? g.rho_max : law.k_inverse(n * g.dk);
    g.dkdr[n] = law.dk(g.rho[n]);
    g.dtilde[n] = law.d(g.rho[n]);
    src[n] = law.d2P(g.rho[n]) / g.dkdr[n];
  }
  // The implicit self term needs a weight below 1/2; coarser levels keep the local start.
  for (int n = 1; n <= N; ++n) {
    if (g.dk * g.dtilde[n] / (2 * g.rho[n] * g.dkdr[n]) > 0.5) g.seeded = n;
  }
  g.seeded = std::max(g.seeded, 1);

  // The march only uses nodes with j + n even (the characteristic lattice). Near-cone errors are
  // neutral under the march, so levels where the law is still polytropic to 1e-3 keep the local
  // start, up to N/16.
  g.chi.assign(std::size_t(N + 1) * g.width, 0.0);
  g.h.assign(g.chi.size(), 0.0);
  bool poly_start = true;
  for (int n = 1; n <= N; ++n) {
    const double th = g.rho[n] * g.dkdr[n] / (n * g.dk);
    for (int j = -n; j <= n; ++j) {
      g.chi[g.idx(n, j)] = local_start(law, g.rho[n], j * g.dk, false);
      g.h[g.idx(n, j)] = local_start(law, g.rho[n], j * g.dk, true);
    }
    poly_start = poly_start && n <= N / 16 && std::fabs(th / law.theta1() - 1) <= 1e-3;
    if (poly_start) g.seeded = std::max(g.seeded, n);
  }

  // x^lambda endpoint corrections from the generalized Euler-Maclaurin expansion; the exact
  // single-cell weight when the node itself closes that cell
  // Two terms when the branch has two history nodes past the cone: with f = x^lambda (g0 + g1 x),
  // g0 = 2 f1 - f2 / 2^lambda and g1 = f2 / 2^lambda - f1.
  const double lam1 = law.lambda1();
  const double z0 = boost::math::zeta(-lam1), z1 = boost::math::zeta(-lam1 - 1);
  const double edge = -z0;
  const double edge1 = 1.0 / (lam1 + 1) - 0.5;
  const double e21 = -2 * z0 + z1, e22 = (z0 - z1) / std::pow(2.0, lam1);
  auto edge_wt = [&](int m, int m0, int n) {
    if (m0 < 1) return 1.0;
    if (m0 + 2 < n) return m == m0 + 1 ? 1.0 + e21 : m == m0 + 2 ? 1.0 + e22 : 1.0;
    return m == m0 + 1 ? 1.0 + edge : 1.0;
  };
  std::vector<double> raw_c(g.width), raw_h(g.width);
  g.mass_defect.assign(N + 1, 0.0);
  double scale = 0;
  for (double c : g.chi) scale = std::max(scale, std::fabs(c));
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double dchi = 0, dh = 0, hscale = 0;
    for (int n = g.seeded + 1; n <= N; ++n) {
      const double base = g.dk / (2 * g.rho[n] * g.dkdr[n]);
      // cone nodes stay zero; interior j has j + n even
      for (int j = -n + 2; j <= n - 2; j += 2) {
        double sc = 0, sh = 0, sq = 0;
        double self = 0;  // weight of the node itself, per branch
        // Branch a reaches the cone at level (j + n)/2, branch b at (n - j)/2. On the first cell
        // after the cone the integrand grows like x^lambda1 and gets the matching weight.
        const int ma = (j + n) / 2, mb = (n - j) / 2;
        for (int m = std::max(1, ma + 1); m < n; ++m) {
          const std::size_t a = g.idx(m, j + n - m);
          const double wt = edge_wt(m, ma, n);
          sc += wt * g.dtilde[m] * g.chi[a];
          sh += wt * g.dtilde[m] * g.h[a];
          sq += wt * src[m] * g.chi[a];
        }
        const double self_a = ma == n - 1 ? 0.5 + edge1 : 0.5;
        self += self_a;
        for (int m = std::max(1, mb + 1); m < n; ++m) {
          const std::size_t b = g.idx(m, j - n + m);
          const double wt = edge_wt(m, mb, n);
          sc += wt * g.dtilde[m] * g.chi[b];
          sh += wt * g.dtilde[m] * g.h[b];
          sq -= wt * src[m] * g.chi[b];
        }
        const double self_b = mb == n - 1 ? 0.5 + edge1 : 0.5;
        self += self_b;
        const double inv = base / (1 - base * g.dtilde[n] * self);
        raw_c[j + N] = sc * inv;
        // the source self terms cancel unless one branch closes its edge cell at the node
        raw_h[j + N] = (sh + sq + (self_a - self_b) * src[n] * raw_c[j + N]) * inv;
      }
      // int chi dv = rho holds for every law (the v-integral solves y'' = 0 with y(0) = 0, y'(0) = 1)
      double mass = 0;
      for (int j = -n + 2; j <= n - 2; j += 2) mass += raw_c[j + N];
      if (n >= 6) {
        mass += e21 * (raw_c[n - 2 + N] + raw_c[-n + 2 + N]) + e22 * (raw_c[n - 4 + N] + raw_c[-n + 4 + N]);
      } else {
        mass += edge * (raw_c[n - 2 + N] + raw_c[-n + 2 + N]);
      }
      mass *= 2 * g.dk;
      // int v h dv = -P for every law as well
      auto vh = [&](int j) { return j * g.dk * raw_h[j + N]; };
      double mom = 0;
      for (int j = -n + 2; j <= n - 2; j += 2) mom += vh(j);
      if (n >= 6) {
        mom += e21 * (vh(n - 2) + vh(-n + 2)) + e22 * (vh(n - 4) + vh(-n + 4));
      } else {
        mom += edge * (vh(n - 2) + vh(-n + 2));
      }
      mom *= 2 * g.dk;
      const double hfix = mom != 0 ? -law.P(g.rho[n]) / mom : 1.0;
      g.mass_defect[n] = mass / g.rho[n] - 1;
      const double fix = g.rho[n] / mass;
      for (int j = -n + 2; j <= n - 2; j += 2) {
        const std::size_t c = g.idx(n, j);
        const double nc = raw_c[j + N] * fix, nh = raw_h[j + N] * hfix;
        dchi = std::max(dchi, std::fabs(nc - g.chi[c]));
        dh = std::max(dh, std::fabs(nh - g.h[c]));
        g.chi[c] = nc;
        g.h[c] = nh;
        scale = std::max(scale, std::fabs(nc));
        hscale = std::max(hscale, std::fabs(nh));
      }
    }
    g.sweeps = sweep;
    g.changes.push_back(dchi / scale);
    g.changes.push_back(dh / std::max(hscale, 1e-300));
    if (!std::isfinite(dchi) || !std::isfinite(dh)) throw NumericalError("solve_kernel: non-finite values");
    if (sweep > 1 && dchi <= opt.tol * scale && dh <= opt.tol * hscale) {
      const double lam = law.lambda1();
      for (int n = g.seeded + 1; n <= N; ++n) {
        // average chi / (n^2 - j^2)^lambda, the cone nodes taking the ratio of their neighbour
        auto wgt = [&](int j) { return std::pow(double(n) * n - double(j) * j, lam); };
        auto ratio = [&](const std::vector<double>& f, int j) {
          const int i = std::clamp(j, -n + 2, n - 2);
          return f[g.idx(n, i)] / wgt(i);
        };
        for (int j = -n + 1; j < n; j += 2) {
          g.chi[g.idx(n, j)] = 0.5 * (ratio(g.chi, j - 1) + ratio(g.chi, j + 1)) * wgt(j);
          g.h[g.idx(n, j)] = 0.5 * (ratio(g.h, j - 1) + ratio(g.h, j + 1)) * wgt(j);
        }
      }
      return g;
    }
  }
  throw NumericalError("solve_kernel: no convergence after " + std::to_string(opt.max_sweeps) +
                       " sweeps, last change " + std::to_string(g.changes[g.changes.size() - 2]));
}

namespace {

// value at level L and scaled position z = v / k, linear in f / (L^2 - x^2)^lambda
double level_value(const KernelGrid& g, const std::vector<double>& f, int L, double z, double lam) {
  const double x = z * L;
  int j = int(std::floor(x));
  j = std::clamp(j, -L + 1, L - 2);
  const double t = x - j;
  auto ratio = [&](int i) { return f[g.idx(L, i)] / std::pow(double(L) * L - double(i) * i, lam); };
  return ((1 - t) * ratio(j) + t * ratio(j + 1)) * std::pow(std::max(0.0, double(L) * L - x * x), lam);
}

// Self-similar blend between neighbouring levels: chi scales like rho / k, h like rho.
double blend(const KernelGrid& g, const PressureLaw& law, const std::vector<double>& f, double rho, double v,
             bool is_h) {
  if (!(rho >= 0)) throw DomainError("kernel evaluator: density must be >= 0");
  if (rho == 0) return 0.0;
  const double kv = law.k(rho);
  if (std::fabs(v) >= kv) return 0.0;
  if (kv > g.N * g.dk * (1 + 1e-12)) throw DomainError("kernel evaluator: density beyond the solved range");
  if (kv <= g.seeded * g.dk) return local_start(law, rho, v, is_h);
  const double z = v / kv, x = kv / g.dk;
  int n = int(std::floor(x));
  double t = x - n;
  if (n >= g.N) n = g.N - 1, t = 1;
  auto at = [&](int L) {
    const double s = is_h ? rho / g.rho[L] : rho * L * g.dk / (g.rho[L] * kv);
    return level_value(g, f, L, z, law.lambda1()) * s;
  };
  return (1 - t) * at(n) + t * at(n + 1);
}

}  // namespace

double kernel_chi(const KernelGrid& g, const PressureLaw& law, double rho, double v) {
  return blend(g, law, g.chi, rho, v, false);
}

double kernel_h(const KernelGrid& g, const PressureLaw& law, double rho, double v) {
  return blend(g, law, g.h, rho, v, true);
}

double kernel_mass(const KernelGrid& g, const PressureLaw& law, double rho) {
  if (rho <= 0) return 0.0;
  const double x = law.k(rho) / g.dk;
  if (x <= g.seeded) return rho;
  int n = int(std::floor(x));
  double t = x - n;
  if (n >= g.N) n = g.N - 1, t = 1;
  const double lam = law.lambda1();
  const double z0 = boost::math::zeta(-lam), z1 = boost::math::zeta(-lam - 1);
  auto ratio = [&](int L) {
    double s = 0;
    for (int j = -L; j <= L; ++j) s += g.chi[g.idx(L, j)];
    auto f = [&](int d) { return g.chi[g.idx(L, L - d)] + g.chi[g.idx(L, d - L)]; };
    if (L >= 3) {
      s += (-2 * z0 + z1) * f(1) + (z0 - z1) / std::pow(2.0, lam) * f(2);
    } else {
      s -= z0 * f(1);
    }
    return s * g.dk / g.rho[L];
  };
  return ((1 - t) * ratio(n) + t * ratio(n + 1)) * rho;
}

KernelOracle kernel_vs_closed_form(const KernelGrid& g, const PressureLaw& law) {
  KernelOracle o;
  for (int n = 2; n <= g.N; ++n) {
    double sc = 0, sh = 0, ec = 0, eh = 0, eb = 0;
    for (int j = -n; j <= n; ++j) {
      const double v = j * g.dk;
      const double c = chi_closed_form(law, g.rho[n], v), hh = sigma_minus_u_chi_closed(law, g.rho[n], v);
      const double dc = std::fabs(g.chi[g.idx(n, j)] - c), dh = std::fabs(g.h[g.idx(n, j)] - hh);
      sc = std::max(sc, c);
      sh = std::max(sh, std::fabs(hh));
      if (std::abs(j) >= n - 1) {
        eb = std::max(eb, dc);
      } else {
        ec = std::max(ec, dc);
        eh = std::max(eh, dh);
      }
    }
    o.chi_rel = std::max(o.chi_rel, ec / sc);
    o.h_rel = std::max(o.h_rel, eh / sh);
    o.boundary_rel = std::max(o.boundary_rel, eb / sc);

    // the formula evaluated just outside the cone, from the stored levels
    for (int j : {-n - 2, -n - 1, n + 1, n + 2}) {
      double s = 0;
      for (int m = 1; m < n; ++m) {
        for (int a : {j + n - m, j - n + m}) {
          if (std::abs(a) <= m) s += g.dtilde[m] * g.chi[g.idx(m, a)];
        }
      }
      o.support = std::max(o.support, std::fabs(s) * g.dk / (2 * g.rho[n] * g.dkdr[n]) / sc);
    }
  }
  return o;
}

// --- evaluators and pairs --------------------------------------------------

EntropyKernel::EntropyKernel(const PressureLaw& law, KernelOptions opt, bool force_grid)
    : law_(law), opt_(opt), grid_(force_grid || law.kind() != LawKind::Polytropic) {}

std::shared_ptr<const KernelGrid> EntropyKernel::ensure(double rho) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!g_) g_ = std::make_shared<const KernelGrid>(solve_kernel(law_, opt_));
  if (rho > g_->rho_max) {
    KernelOptions o = opt_;
    o.rho_max = 2.0 * rho;
    g_ = std::make_shared<const KernelGrid>(solve_kernel(law_, o));
  }
  return g_;
}

double EntropyKernel::chi(double rho, double v) {
  if (!grid_) return chi_closed_form(law_, rho, v);
  return kernel_chi(*ensure(rho), law_, rho, v);
}

double EntropyKernel::h(double rho, double v) {
  if (!grid_) return sigma_minus_u_chi_closed(law_, rho, v);
  return kernel_h(*ensure(rho), law_, rho, v);
}

TestFunction bump(double center, double radius) {
  TestFunction t;
  t.lo = center - radius;
  t.hi = center + radius;
  t.psi = [center, radius](double s) {
    const double x = (s - center) / radius;
    if (std::fabs(x) >= 1) return 0.0;
    const double y = 1 - x * x;
    return y * y * y;
  };
  return t;
}

WeakPair weak_entropy_pair(EntropyKernel& K, const TestFunction& psi, double rho, double u) {
  WeakPair out;
  if (!(rho >= 0)) throw DomainError("weak_entropy_pair: density must be >= 0");
  if (rho == 0) return out;
  const double kv = K.law().k(rho);
  const double slo = std::max(u - kv, psi.lo), shi = std::min(u + kv, psi.hi);
  if (!(shi > slo)) return out;
  // v = u - s = k sin t
  const double t0 = std::asin(std::clamp((u - shi) / kv, -1.0, 1.0));
  const double t1 = std::asin(std::clamp((u - slo) / kv, -1.0, 1.0));
  using GL = boost::math::quadrature::gauss<double, 30>;
  const auto& x = GL::abscissa();
  const auto& wt = GL::weights();
  const int panels = 4;
  for (int p = 0; p < panels; ++p) {
    const double a = t0 + (t1 - t0) * p / panels, b = t0 + (t1 - t0) * (p + 1) / panels;
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        if (x[i] == 0 && sgn < 0) continue;
        const double t = c + sgn * r * x[i];
        const double v = kv * std::sin(t), jac = kv * std::cos(t) * r * wt[i];
        const double ps = psi.psi(u - v), ch = K.chi(rho, v);
        out.eta += ps * ch * jac;
        out.q += ps * (K.h(rho, v) + u * ch) * jac;
      }
    }
  }
  return out;
}

MechanicalPair mechanical_pair(const PressureLaw& law, double rho, double m) {
  if (!(rho >= 0)) throw DomainError("mechanical_pair: density must be >= 0");
  if (rho == 0) {
    if (m != 0) throw DomainError("mechanical_pair: momentum must vanish at vacuum");
    return {};
  }
  const double e = law.e(rho);
  return {0.5 * m * m / rho + rho * e, 0.5 * m * m * m / (rho * rho) + m * (e + law.P(rho) / rho)};
}

namespace {

// eta^psi and q^psi on a stored level with trapezoid in v
WeakPair level_pair(const KernelGrid& g, const TestFunction& psi, int n, double u) {
  WeakPair p;
  for (int j = -n; j <= n; ++j) {
    const double v = j * g.dk, ps = psi.psi(u - v);
    if (ps == 0) continue;
    const double c = g.chi[g.idx(n, j)];
    p.eta += ps * c;
    p.q += ps * (g.h[g.idx(n, j)] + u * c);
  }
  p.eta *= g.dk;
  p.q *= g.dk;
  return p;
}

}  // namespace

KernelFits kernel_growth_fits(const KernelGrid& g, const PressureLaw& law, const TestFunction& psi, double rho_lo,
                              double rho_hi) {
  KernelFits f;
  const double e2 = 1 + law.theta2();
  for (int n = 1; n <= g.N; ++n) {
    const double r = g.rho[n];
    if (r < rho_lo * (1 - 1e-12) || r > rho_hi * (1 + 1e-12)) continue;
    double sc = 0, sh = 0;
    for (int j = -n; j <= n; ++j) {
      sc = std::max(sc, g.chi[g.idx(n, j)]);
      sh = std::max(sh, std::fabs(g.h[g.idx(n, j)]));
    }
    f.C_chi = std::max(f.C_chi, sc / r);
    f.C_h = std::max(f.C_h, sh / std::pow(r, e2));
    const double kv = n * g.dk;
    for (int i = 0; i <= 40; ++i) {
      const double u = psi.lo - kv + (psi.hi - psi.lo + 2 * kv) * i / 40.0;
      const WeakPair p = level_pair(g, psi, n, u);
      f.C_eta = std::max(f.C_eta, std::fabs(p.eta) / r);
      f.C_q = std::max(f.C_q, std::fabs(p.q) / std::pow(r, e2));
    }
  }
  return f;
}

double weak_entropy_residual(const KernelGrid& g, const PressureLaw& law, const TestFunction& psi, double rho,
                             double u) {
  int n = int(std::lround(law.k(rho) / g.dk));
  n = std::clamp(n, 3, g.N - 2);
  // u snapped to the v lattice so the u-shifts stay on nodes
  const double uu = std::round(u / g.dk) * g.dk;
  const double d = 2 * g.dk;
  const double e0 = level_pair(g, psi, n, uu).eta;
  const double ekp = level_pair(g, psi, n + 2, uu).eta, ekm = level_pair(g, psi, n - 2, uu).eta;
  const double eup = level_pair(g, psi, n, uu + d).eta, eum = level_pair(g, psi, n, uu - d).eta;
  const double ekk = (ekp - 2 * e0 + ekm) / (d * d), euu = (eup - 2 * e0 + eum) / (d * d);
  const double ek = (ekp - ekm) / (2 * d);
  const double r = g.rho[n], k1 = g.dkdr[n], k2 = law.d2k(r);
  const double res = k1 * k1 * (ekk - euu) + k2 * ek;
  const double scale = k1 * k1 * (std::fabs(ekk) + std::fabs(euu)) + std::fabs(k2 * ek);
  return scale > 0 ? std::fabs(res) / scale : 0.0;
}

}  // namespace sg
