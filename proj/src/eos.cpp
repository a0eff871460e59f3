// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
#include "eos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

namespace sg {

namespace {

using boost::math::quadrature::gauss;

// Running integral F(y) = int_0^y f on log-spaced nodes 10^-24 .. 10^24.
// Between nodes the remainder is integrated on the fly in ln y, so values
// are quadrature-accurate rather than interpolated.
class Cumulative {
 public:
  static constexpr double kLoExp = -24.0, kHiExp = 24.0, kPerDecade = 20.0;

  Cumulative(std::function<double(double)> f, double p) : f_(std::move(f)), p_(p) {
    const int n = static_cast<int>((kHiExp - kLoExp) * kPerDecade) + 1;
    lny_.resize(n);
    F_.resize(n);
    for (int i = 0; i < n; ++i) lny_[i] = std::log(10.0) * (kLoExp + i / kPerDecade);
    F_[0] = head(std::exp(lny_[0]));
    for (int i = 1; i < n; ++i) F_[i] = F_[i - 1] + seg(lny_[i - 1], lny_[i]);
  }

  double operator()(double y) const {
    if (y <= 0.0) return 0.0;
    const double t = std::log(y);
    if (t <= lny_.front()) return head(y);
    const double step = std::log(10.0) / kPerDecade;
    std::size_t i = static_cast<std::size_t>((t - lny_.front()) / step);
    if (i >= lny_.size() - 1) {
      double acc = F_.back(), a = lny_.back();
      while (t - a > step) {
        acc += seg(a, a + step);
        a += step;
      }
      return acc + seg(a, t);
    }
    return F_[i] + seg(lny_[i], t);
  }

 private:
  // f ~ c y^(p-1) near 0: substitute y = Y s^(1/p) so the integrand is nearly constant.
  double head(double Y) const {
    return gauss<double, 20>::integrate(
        [&](double s) { return f_(Y * std::pow(s, 1.0 / p_)) * Y / p_ * std::pow(s, 1.0 / p_ - 1.0); }, 0.0, 1.0);
  }

  double seg(double a, double b) const {
    if (b <= a) return 0.0;
    return gauss<double, 10>::integrate([&](double t) { double y = std::exp(t); return f_(y) * y; }, a, b);
  }

  std::function<double(double)> f_;
  double p_;
  std::vector<double> lny_, F_;
};

double wd_x(const LawParams& p, double rho) { return p.C2 * std::cbrt(rho); }

// int_0^x s^4/sqrt(C3+s^2) ds
double wd_I(double x, double C3) {
  const double a = std::sqrt(C3), t = x * x / C3;
  if (t < 0.25) {
    double sum = 0.0, bin = 1.0, tn = 1.0;
    for (int n = 0; n < 60; ++n) {
      const double term = bin * tn / (5.0 + 2.0 * n);
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
      bin *= (-0.5 - n) / (n + 1.0);
      tn *= t;
    }
    return std::pow(x, 5) / a * sum;
  }
  const double r = std::sqrt(C3 + x * x);
  return x * x * x * r / 4.0 - 3.0 * C3 * x * r / 8.0 + 3.0 * C3 * C3 / 8.0 * std::asinh(x / a);
}

double wd_P(const LawParams& p, double rho) { return p.C1 * wd_I(wd_x(p, rho), p.C3); }
double wd_dP(const LawParams& p, double rho) {
  const double x = wd_x(p, rho);
  return p.C1 * p.C2 * p.C2 * p.C2 * x * x / (3.0 * std::sqrt(p.C3 + x * x));
}
double wd_d2P(const LawParams& p, double rho) {
  const double x = wd_x(p, rho), s = p.C3 + x * x;
  return p.C1 * std::pow(p.C2, 6) * (2.0 * p.C3 + x * x) / (9.0 * x * s * std::sqrt(s));
}
double wd_e(const LawParams& p, double rho) {
  const double x = wd_x(p, rho);
  const double H = p.C1 * p.C2 * p.C2 * p.C2 * x * x / (std::sqrt(p.C3 + x * x) + std::sqrt(p.C3));
  return H - wd_P(p, rho) / rho;
}

double pd_dP(const LawParams& p, double rho) {
  const double x = std::cbrt(rho);
  return x * x / (3.0 * std::sqrt(p.delta + std::pow(x, 2.0 + p.eps0)));
}
double pd_d2P(const LawParams& p, double rho) {
  const double x = std::cbrt(rho), q = 2.0 + p.eps0, xq = std::pow(x, q), s = p.delta + xq;
  const double dPdx = (2.0 * x / std::sqrt(s) - 0.5 * q * xq * x / (s * std::sqrt(s))) / 3.0;
  return dPdx / (3.0 * x * x);
}

void check_rho(double rho, const char* what) {
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw DomainError(std::string(what) + ": density must be finite and >= 0");
}
void check_pos(double rho, const char* what) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError(std::string(what) + ": density must be finite and > 0");
}

}  // namespace

class CumulativeTable : public Cumulative {
 public:
  using Cumulative::Cumulative;
};

const char* kind_name(LawKind k) {
  switch (k) {
    case LawKind::Polytropic: return "polytropic";
    case LawKind::WhiteDwarf: return "white_dwarf";
    case LawKind::PDelta: return "p_delta";
  }
  return "?";
}

PressureLaw::PressureLaw(const LawParams& p) : p_(p) {
  switch (p.kind) {
    case LawKind::Polytropic:
      if (!(p.kappa > 0.0)) throw ConfigError("polytropic: kappa must be > 0");
      g1_ = g2_ = p.gamma;
      k1_ = k2_ = p.kappa;
      eps_ = 1.0;
      break;
    case LawKind::WhiteDwarf: {
      if (!(p.C1 > 0.0 && p.C2 > 0.0 && p.C3 > 0.0)) throw ConfigError("white_dwarf: C1, C2, C3 must be > 0");
      g1_ = 5.0 / 3.0;
      g2_ = 4.0 / 3.0;
      k1_ = p.C1 * std::pow(p.C2, 5) / (5.0 * std::sqrt(p.C3));
      k2_ = p.C1 * std::pow(p.C2, 4) / 4.0;
      eps_ = 2.0 / 3.0;
      const LawParams q = p;
      ktab_ = std::make_shared<CumulativeTable>(
          [q](double y) { return y > 0.0 ? std::sqrt(wd_dP(q, y)) / y : 0.0; }, 1.0 / 3.0);
      break;
    }
    case LawKind::PDelta: {
      if (!(p.delta > 0.0)) throw ConfigError("p_delta: delta must be > 0");
      if (!(p.eps0 > 0.0 && p.eps0 < 0.8)) throw ConfigError("p_delta: eps0 must lie in (0, 4/5)");
      g1_ = 5.0 / 3.0;
      g2_ = 4.0 / 3.0 - p.eps0 / 6.0;
      k1_ = 1.0 / (5.0 * std::sqrt(p.delta));
      k2_ = 1.0 / (4.0 - p.eps0 / 2.0);
      eps_ = (2.0 + p.eps0) / 3.0;
      const LawParams q = p;
      auto pt = std::make_shared<CumulativeTable>([q](double y) { return y > 0.0 ? pd_dP(q, y) : 0.0; }, g1_);
      ptab_ = pt;
      etab_ = std::make_shared<CumulativeTable>(
          [pt](double y) { return y > 0.0 ? (*pt)(y) / (y * y) : 0.0; }, g1_ - 1.0);
      ktab_ = std::make_shared<CumulativeTable>(
          [q](double y) { return y > 0.0 ? std::sqrt(pd_dP(q, y)) / y : 0.0; }, (g1_ - 1.0) / 2.0);
      break;
    }
  }
  if (!(g1_ > 1.0 && g1_ < 3.0)) throw ConfigError("gamma1 must lie in (1, 3)");
  if (!(g2_ > 1.0 && g2_ <= g1_)) throw ConfigError("gamma2 must lie in (1, gamma1]");

  if (p.kind == LawKind::Polytropic) {
    rlo_ = p.rho_lo > 0.0 ? p.rho_lo : 1.0;
    rhi_ = p.rho_hi > 0.0 ? p.rho_hi : 2.0 * rlo_;
  } else {
    rlo_ = p.rho_lo > 0.0 ? p.rho_lo : scan_rho_lo(p);
    rhi_ = p.rho_hi > 0.0 ? p.rho_hi : scan_rho_hi(p);
  }
  if (!(rhi_ > rlo_)) throw ConfigError("rho_hi must exceed rho_lo");
  check_structure();
}

void PressureLaw::require_solver_range() const {
  if (!(g2_ > 1.2)) throw ConfigError("gamma2 must exceed 6/5 for the solver");
}

double PressureLaw::nu() const { return 1.0 - (3.0 * g1_ - 1.0) * (g1_ - 1.0) / (2.0 * (5.0 + g1_)); }

double PressureLaw::P(double rho) const {
  check_rho(rho, "pressure");
  if (rho == 0.0) return 0.0;
  switch (p_.kind) {
    case LawKind::Polytropic: return p_.kappa * std::pow(rho, p_.gamma);
    case LawKind::WhiteDwarf: return wd_P(p_, rho);
    case LawKind::PDelta: return (*ptab_)(rho);
  }
  return 0.0;
}

double PressureLaw::dP(double rho) const {
  check_rho(rho, "dP");
  if (rho == 0.0) return 0.0;
  switch (p_.kind) {
    case LawKind::Polytropic: return p_.kappa * p_.gamma * std::pow(rho, p_.gamma - 1.0);
    case LawKind::WhiteDwarf: return wd_dP(p_, rho);
    case LawKind::PDelta: return pd_dP(p_, rho);
  }
  return 0.0;
}

double PressureLaw::d2P(double rho) const {
  check_pos(rho, "d2P");
  switch (p_.kind) {
    case LawKind::Polytropic: return p_.kappa * p_.gamma * (p_.gamma - 1.0) * std::pow(rho, p_.gamma - 2.0);
    case LawKind::WhiteDwarf: return wd_d2P(p_, rho);
    case LawKind::PDelta: return pd_d2P(p_, rho);
  }
  return 0.0;
}

double PressureLaw::sound_speed(double rho) const {
  check_pos(rho, "sound_speed");
  return std::sqrt(dP(rho));
}

double PressureLaw::k(double rho) const {
  check_rho(rho, "k");
  if (rho == 0.0) return 0.0;
  if (p_.kind == LawKind::Polytropic) {
    const double th = 0.5 * (p_.gamma - 1.0);
    return std::sqrt(p_.kappa * p_.gamma) / th * std::pow(rho, th);
  }
  return (*ktab_)(rho);
}

double PressureLaw::dk(double rho) const {
  check_pos(rho, "dk");
  return std::sqrt(dP(rho)) / rho;
}

double PressureLaw::d2k(double rho) const { return dk(rho) * (d(rho) - 2.0) / rho; }

double PressureLaw::e(double rho) const {
  check_rho(rho, "e");
  if (rho == 0.0) return 0.0;
  switch (p_.kind) {
    case LawKind::Polytropic: return p_.kappa * std::pow(rho, p_.gamma - 1.0) / (p_.gamma - 1.0);
    case LawKind::WhiteDwarf: return wd_e(p_, rho);
    case LawKind::PDelta: return (*etab_)(rho);
  }
  return 0.0;
}

double PressureLaw::de(double rho) const {
  check_pos(rho, "de");
  return P(rho) / (rho * rho);
}

double PressureLaw::d(double rho) const {
  check_pos(rho, "d");
  switch (p_.kind) {
    case LawKind::Polytropic: return 1.0 + 0.5 * (p_.gamma - 1.0);
    case LawKind::WhiteDwarf: {
      const double x = wd_x(p_, rho), x2 = x * x;
      return 1.0 + (2.0 * p_.C3 + x2) / (6.0 * (p_.C3 + x2));
    }
    case LawKind::PDelta: {
      const double xq = std::pow(std::cbrt(rho), 2.0 + p_.eps0);
      return 1.0 + (2.0 - 0.5 * (2.0 + p_.eps0) * xq / (p_.delta + xq)) / 6.0;
    }
  }
  return 0.0;
}

double PressureLaw::h(double rho) const {
  check_rho(rho, "h");
  if (rho == 0.0) return 0.0;
  return P(rho) / rho - (g2_ - 1.0) * e(rho);
}

double PressureLaw::k_inverse(double kv) const {
  if (!(kv >= 0.0) || !std::isfinite(kv)) throw DomainError("k_inverse: value must be finite and >= 0");
  if (kv == 0.0) return 0.0;
  if (p_.kind == LawKind::Polytropic) {
    const double th = 0.5 * (p_.gamma - 1.0);
    return std::pow(kv * th / std::sqrt(p_.kappa * p_.gamma), 1.0 / th);
  }
  // Start from whichever tail power law is closer, then bracket in ln rho.
  const double th1 = theta1(), th2 = theta2();
  const double klo = std::sqrt(k1_ * g1_) / th1, khi = std::sqrt(k2_ * g2_) / th2;
  double t0 = std::log(std::pow(kv / klo, 1.0 / th1));
  if (kv > k(rhi_)) t0 = std::log(std::pow(kv / khi, 1.0 / th2));
  auto f = [&](double t) { return k(std::exp(t)) - kv; };
  double a = t0 - 0.5, b = t0 + 0.5;
  double fa = f(a), fb = f(b);
  for (int it = 0; fa > 0.0 && it < 200; ++it) { a -= 2.0; fa = f(a); }
  for (int it = 0; fb < 0.0 && it < 200; ++it) { b += 2.0; fb = f(b); }
  if (fa > 0.0 || fb < 0.0) throw NumericalError("k_inverse: bracketing failed");
  boost::uintmax_t iters = 200;
  auto tol = [](double x, double y) { return std::fabs(x - y) < 1e-15 * std::max(1.0, std::fabs(x)); };
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  double t = 0.5 * (r.first + r.second);
  // one Newton polish: dk/dt = sqrt(P')
  const double rho = std::exp(t);
  t -= (k(rho) - kv) / std::sqrt(dP(rho));
  return std::exp(t);
}

void PressureLaw::check_structure() const {
  double prevP = 0.0, prevk = 0.0, preve = 0.0, prevc = 0.0;
  for (int i = 0; i <= 240; ++i) {
    const double rho = std::pow(10.0, -12.0 + 0.1 * i);
    const double Pv = P(rho), dPv = dP(rho), d2 = d2P(rho), kv = k(rho), ev = e(rho);
    if (!(dPv > 0.0)) throw ConfigError("pressure law: P' must be positive");
    if (!(2.0 * dPv + rho * d2 > 0.0)) throw ConfigError("pressure law: 2P' + rho P'' must be positive");
    if (!(Pv > prevP && kv > prevk && ev > preve && dPv > prevc))
      throw ConfigError("pressure law: P, c^2, k, e must be strictly increasing");
    prevP = Pv;
    prevk = kv;
    preve = ev;
    prevc = dPv;
  }
}

// --- asymptotic bounds -------------------------------------------------------

std::vector<double> default_tail_grid(const PressureLaw& law, int per_decade) {
  std::vector<double> g;
  for (int i = -12 * per_decade; i <= 0; ++i) g.push_back(law.rho_lo() * std::pow(10.0, double(i) / per_decade));
  for (int i = 0; i <= 12 * per_decade; ++i) g.push_back(law.rho_hi() * std::pow(10.0, double(i) / per_decade));
  return g;
}

AsymptoticReport verify_asymptotic_bounds(const PressureLaw& law, const std::vector<double>& rhos) {
  return verify_asymptotic_bounds(law, rhos, 3);
}

AsymptoticReport verify_asymptotic_bounds(const PressureLaw& law, const std::vector<double>& rhos, int tails) {
  AsymptoticReport rep;
  const double a0 = law.a0();
  rep.nu = law.nu();
  rep.nu_high = 1.0 - (1.0 - a0) * (law.gamma2() - 1.0) / (2.0 * (1.0 + a0));
  rep.worst_margin = std::numeric_limits<double>::infinity();
  struct Fit { double lo = std::numeric_limits<double>::infinity(), hi = 0.0; } fe, fde, fk, fdk, fd2k;
  auto fit = [](Fit& f, double r) { f.lo = std::min(f.lo, r); f.hi = std::max(f.hi, r); };
  auto sandwich = [&](const char* name, double rho, double ratio) {
    const double lo = 1.0 - a0, hi = 1.0 + a0;
    const double margin = std::min(ratio - lo, hi - ratio);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < 0.0) {
      rep.pass = false;
      rep.violations.push_back({name, rho, ratio, lo, hi});
    }
  };
  for (double rho : rhos) {
    if (!(rho > 0.0)) continue;
    const bool low = rho <= law.rho_lo(), high = rho >= law.rho_hi();
    if (!((low && (tails & 1)) || (high && (tails & 2)))) continue;
    const double g = low ? law.gamma1() : law.gamma2();
    const double kap = low ? law.kappa1() : law.kappa2();
    const double th = 0.5 * (g - 1.0);
    sandwich("P", rho, law.P(rho) / (kap * std::pow(rho, g)));
    sandwich("P'", rho, law.dP(rho) / (kap * g * std::pow(rho, g - 1.0)));
    sandwich("P''", rho, law.d2P(rho) / (kap * g * (g - 1.0) * std::pow(rho, g - 2.0)));
    fit(fe, law.e(rho) / std::pow(rho, g - 1.0));
    fit(fde, law.de(rho) / std::pow(rho, g - 2.0));
    fit(fk, law.k(rho) / std::pow(rho, th));
    fit(fdk, law.dk(rho) / std::pow(rho, th - 1.0));
    fit(fd2k, std::fabs(law.d2k(rho)) / std::pow(rho, th - 2.0));
    const double q = std::fabs(rho * law.d2k(rho) / law.dk(rho));
    const double bound = low ? rep.nu : rep.nu_high;
    if (low) rep.max_rho_k2_over_k1_low = std::max(rep.max_rho_k2_over_k1_low, q);
    else rep.max_rho_k2_over_k1_high = std::max(rep.max_rho_k2_over_k1_high, q);
    if (!(q > 0.0 && q <= bound)) {
      rep.pass = false;
      rep.violations.push_back({"|rho k''/k'|", rho, q, 0.0, bound});
    }
  }
  auto C = [](const Fit& f) { return f.hi > 0.0 ? std::max(f.hi, 1.0 / f.lo) : 0.0; };
  rep.C_e = C(fe);
  rep.C_de = C(fde);
  rep.C_k = C(fk);
  rep.C_dk = C(fdk);
  rep.C_d2k = C(fd2k);
  for (double c : {rep.C_e, rep.C_de, rep.C_k, rep.C_dk, rep.C_d2k})
    if (!std::isfinite(c)) rep.pass = false;
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  return rep;
}

double scan_rho_lo(const LawParams& p) {
  for (int j = 0; j >= -20; --j) {
    LawParams q = p;
    q.rho_lo = std::pow(10.0, j);
    q.rho_hi = std::pow(10.0, 30);
    PressureLaw law(q);
    std::vector<double> g;
    for (int i = -120; i <= 0; ++i) g.push_back(q.rho_lo * std::pow(10.0, i / 10.0));
    if (verify_asymptotic_bounds(law, g, 1).pass) return q.rho_lo;
  }
  throw NumericalError("no admissible low-density threshold found down to 1e-20");
}

double scan_rho_hi(const LawParams& p) {
  for (int j = 0; j <= 20; ++j) {
    LawParams q = p;
    q.rho_hi = std::pow(10.0, j);
    q.rho_lo = std::pow(10.0, -30);
    PressureLaw law(q);
    std::vector<double> g;
    for (int i = 0; i <= 120; ++i) g.push_back(q.rho_hi * std::pow(10.0, i / 10.0));
    if (verify_asymptotic_bounds(law, g, 2).pass) return q.rho_hi;
  }
  throw NumericalError("no admissible high-density threshold found up to 1e20");
}

}  // namespace sg
