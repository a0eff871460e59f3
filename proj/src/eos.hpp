// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Barotropic pressure laws and the thermodynamic functions derived from them.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sg {

enum class LawKind { Polytropic, WhiteDwarf, PDelta };

struct LawParams {
  LawKind kind = LawKind::Polytropic;
  double kappa = 1.0, gamma = 2.0;       // polytropic
  double C1 = 1.0, C2 = 1.0, C3 = 1.0;   // white dwarf
  double delta = 1.0, eps0 = 0.5;        // P_delta
  double rho_lo = -1.0, rho_hi = -1.0;   // tail thresholds; negative = pick by scan
};

const char* kind_name(LawKind k);

class CumulativeTable;

class PressureLaw {
 public:
  explicit PressureLaw(const LawParams& p);

  const LawParams& params() const { return p_; }
  LawKind kind() const { return p_.kind; }

  double P(double rho) const;
  double dP(double rho) const;
  double d2P(double rho) const;
  double sound_speed(double rho) const;
  double k(double rho) const;
  double dk(double rho) const;   // sqrt(P')/rho
  double d2k(double rho) const;
  double e(double rho) const;
  double de(double rho) const;   // P/rho^2
  double d(double rho) const;    // 1 + rho P''/(2P')
  double h(double rho) const;    // P/rho - (gamma2-1) e
  double k_inverse(double kappa) const;

  double gamma1() const { return g1_; }
  double gamma2() const { return g2_; }
  double kappa1() const { return k1_; }
  double kappa2() const { return k2_; }
  double rho_lo() const { return rlo_; }  // rho_*
  double rho_hi() const { return rhi_; }  // rho^*
  double eps() const { return eps_; }
  double theta1() const { return 0.5 * (g1_ - 1.0); }
  double theta2() const { return 0.5 * (g2_ - 1.0); }
  double lambda1() const { return (3.0 - g1_) / (2.0 * (g1_ - 1.0)); }
  double nu() const;
  double a0() const { return (3.0 - g1_) / (2.0 * (g1_ + 1.0)); }
  double gamma_of(double rho) const { return rho <= rlo_ ? g1_ : g2_; }
  double theta_of(double rho) const { return 0.5 * (gamma_of(rho) - 1.0); }

  // Throws ConfigError unless gamma2 is in (6/5, gamma1].
  void require_solver_range() const;

 private:
  void check_structure() const;

  LawParams p_;
  double g1_ = 0, g2_ = 0, k1_ = 0, k2_ = 0, rlo_ = 0, rhi_ = 0, eps_ = 0;
  std::shared_ptr<const CumulativeTable> ktab_, etab_, ptab_;
};

struct BoundViolation {
  std::string quantity;
  double rho;
  double ratio;
  double lower;
  double upper;
};

struct AsymptoticReport {
  bool pass = true;
  double worst_margin = 0.0;  // min over checks of distance to the nearer sandwich edge (negative = violated)
  std::vector<BoundViolation> violations;
  double C_e = 0, C_de = 0, C_k = 0, C_dk = 0, C_d2k = 0;  // fitted two-sided constants
  double max_rho_k2_over_k1_low = 0;   // max |rho k''/k'| on (0, rho_*], compared with nu
  double max_rho_k2_over_k1_high = 0;  // same on [rho^*, inf), compared with nu_high
  double nu = 0, nu_high = 0;
};

// Checks the two-sided power bounds on (0, rho_*] and [rho^*, inf) at the given densities.
AsymptoticReport verify_asymptotic_bounds(const PressureLaw& law, const std::vector<double>& rhos);
std::vector<double> default_tail_grid(const PressureLaw& law, int per_decade = 10);

// Tail selector: 1 = low tail only, 2 = high tail only, 3 = both.
AsymptoticReport verify_asymptotic_bounds(const PressureLaw& law, const std::vector<double>& rhos, int tails);

// Largest low threshold / smallest high threshold (decades) for which the sandwich bounds hold.
double scan_rho_lo(const LawParams& p);
double scan_rho_hi(const LawParams& p);

}  // namespace sg
