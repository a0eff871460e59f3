// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Special entropy pair glued from +/- mechanical energy across the sonic cone,
// built by Picard iteration of the characteristic Goursat problem.
#pragma once

#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "eos.hpp"

namespace sg {

struct GoursatOptions {
  double rho_max = -1.0;  // <= 0: 10 rho^*
  int N = 512;            // cells along 2 k(rho_max) in each Riemann invariant
  double tol = 1e-10;     // relative sup-norm update
  int max_iter = 200;
};

// Field on the characteristic grid alpha = u + k, beta = k - u (both >= 0),
// nodes (i, j) with i + j <= N + 2 and spacing h = 2 k(rho_max) / N.
struct GoursatField {
  int N = 0, side = 0;
  double h = 0, kappa_max = 0, rho_max = 0;
  std::vector<double> V1, V2, eta, q;           // side x side, valid for i + j <= N + 2
  std::vector<double> lev_rho, lev_dk, lev_c;   // per level s = i + j (kappa = s h / 2)
  int iterations = 0;
  int explicit_levels = 0;                      // highest level using the left-endpoint rule
  std::vector<double> deltas;                   // relative sup-norm update per sweep
  double fitted_ratio = 0;

  std::size_t idx(int i, int j) const { return std::size_t(i) * side + j; }
};

GoursatField solve_goursat(const PressureLaw& law, const GoursatOptions& opt);

// (rho1, u1) on u = k, (rho2, u2) on u = -k
std::pair<std::pair<double, double>, std::pair<double, double>> characteristics_through(const PressureLaw& law,
                                                                                         double rho, double u);

struct SpecialValue {
  double eta = 0, eta_rho = 0, eta_u = 0;  // eta_rho at fixed u
  double eta_m = 0, eta_rho_m = 0;         // derivatives in (rho, m)
  bool exterior = false;
};

SpecialValue special_entropy(const GoursatField& f, const PressureLaw& law, double rho, double u);
double special_flux(const GoursatField& f, const PressureLaw& law, double rho, double u);

// Thread-safe evaluator that re-solves on a larger range when a query leaves the grid.
class SpecialEntropy {
 public:
  SpecialEntropy(const PressureLaw& law, GoursatOptions opt);
  SpecialValue entropy(double rho, double u);
  double flux(double rho, double u);
  std::shared_ptr<const GoursatField> field();

 private:
  std::shared_ptr<const GoursatField> ensure(double rho);
  PressureLaw law_;
  GoursatOptions opt_;
  std::mutex mu_;
  std::shared_ptr<const GoursatField> field_;
};

struct GoursatBoundFits {
  double C_eta = 0, C_eta_rho = 0, C_eta_u = 0, C_eta_m = 0;  // (i), (ii)
  double C_eta_mu = 0, C_eta_mrho = 0;                        // (iii)
  double C_q = 0, C_q_ueta = 0;                               // (iv)
};

struct GoursatDiagnostics {
  int N = 0, iterations = 0, explicit_levels = 0;
  double fitted_ratio = 0, theta_ratio_predicted = 0, last_delta = 0;
  double boundary_error = 0;         // start values vs boundary data (relative)
  double cross_route_error = 0;      // int eta_u du across each kappa level vs boundary jump
  double c1_mismatch = 0;            // computed V2 on u = k vs exterior derivative
  double oddness_error = 0;
  double exterior_dissipation = 0;   // max |-q + rho u eta_rho|m + rho u^2 eta_m| / scale
  double exterior_q_min_margin = 0;  // min (q - rho|u|^3/2)/scale over exterior samples
  std::vector<int> res_N;
  std::vector<double> residual, flux_residual, cross_route;
  double residual_order = 0, flux_order = 0, cross_route_order = 0;
  GoursatBoundFits fit_coarse, fit_fine;
  double fit_max_change = 0;         // max relative change of the fitted constants coarse -> fine
};

GoursatBoundFits goursat_bound_fits(const GoursatField& f, const PressureLaw& law);
double goursat_residual(const GoursatField& f, double lo_frac, double hi_frac);
double goursat_flux_residual(const GoursatField& f, double lo_frac, double hi_frac);
double goursat_cross_route(const GoursatField& f, const PressureLaw& law, double lo_frac, double hi_frac);
GoursatDiagnostics goursat_diagnostics(const PressureLaw& law, const GoursatOptions& opt);

}  // namespace sg
