// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Critical total mass for self-gravitating stars and the n = 3 Lane-Emden mass.
#pragma once

#include <vector>

#include "eos.hpp"

namespace sg {

double surface_area(int n);  // omega_n, area of the unit sphere in R^n
double sobolev_A(int n);     // sharp constant A_n = 4/(n(n-2)) omega_{n+1}^(-2/n)

struct CmaxResult {
  double value = 0;
  double rho_arg = 0;       // maximizer (or scan edge)
  bool at_boundary = false; // supremum only approached in a limit
};

CmaxResult c_max(const PressureLaw& law, double beta);
double c_max_limit(const PressureLaw& law);  // value as rho -> infinity
double b_beta(const PressureLaw& law, double cmax);

struct McBeta {
  double beta = 0, cmax = 0, B = 0, M = 0;
  double residual = 0;        // F(M) evaluated at the returned M
  double residual_rel = 0;    // |F| over the sum of magnitudes of its three terms
  double residual_spec = 0;   // |F| / (E0/omega3 + 1)
  bool cmax_at_boundary = false;
};

McBeta m_c_of_beta(const PressureLaw& law, double beta, double E0);
double m_c_residual(const PressureLaw& law, double B, double M, double beta, double E0);

double m_tilde(const PressureLaw& law, double E0);          // beta -> 0 limit of the root equation
double m_tilde_literal(const PressureLaw& law, double E0);  // closed form as printed

struct LaneEmden {
  double xi1 = 0, xi1sq_dtheta = 0, mass = 0;
};
LaneEmden lane_emden(double kappa2, double rho_c, int steps_per_unit = 1000);
double lane_emden_mass(double kappa2);

struct HMonotone {
  bool increasing = true;
  double first_violation = 0;  // density of the first non-increase, 0 when none
};
HMonotone h_monotone(const PressureLaw& law, const std::vector<double>& grid);
std::vector<double> default_h_grid();

struct CriticalMassReport {
  double E0 = 0;
  bool chandrasekhar = false;  // gamma2 == 4/3 route
  std::vector<McBeta> samples;
  double M_c = 0, beta_argmax = 0, M_ch = 0;
  double M_tilde = 0, M_tilde_literal = 0;
  double max_residual_rel = 0, max_residual_spec = 0;
  bool argmax_at_grid_edge = false;
  HMonotone h;
};

CriticalMassReport critical_mass(const PressureLaw& law, double E0);

}  // namespace sg
