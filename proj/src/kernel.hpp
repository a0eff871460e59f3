// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Weak entropy kernel chi, flux kernel (sigma - u chi), their leading expansion
// coefficients, and psi-convolved weak entropy pairs.
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "eos.hpp"

namespace sg {

double kernel_M(double lambda);  // M_lambda as printed
double kernel_B(double lambda);  // int_{-1}^{1} (1 - z^2)^lambda dz, by quadrature

// Leading coefficients of chi = a1 G_lambda + a2 G_{lambda+1} + g1 and the flux analogue.
class KernelCoefficients {
 public:
  explicit KernelCoefficients(const PressureLaw& law);
  double lambda() const { return lambda_; }
  double M() const { return M_; }
  double norm() const { return norm_; }  // constant replacing M in a1, b1 (unit mass at vacuum)
  double a1(double rho) const;
  double b1(double rho) const;
  double da1(double rho) const;
  double db1(double rho) const;
  double a2(double rho) const;
  double b2(double rho) const;
  double D(double rho) const;

 private:
  double d2a1(double rho) const;
  double d2b1(double rho) const;
  PressureLaw law_;
  double lambda_ = 0, M_ = 0, norm_ = 0;
};

double chi_closed_form(const PressureLaw& law, double rho, double v);
double sigma_minus_u_chi_closed(const PressureLaw& law, double rho, double v);  // v = u - s

struct KernelOptions {
  double rho_max = -1.0;  // <= 0: 100 rho^*
  int N = 512;            // levels in k on [0, k(rho_max)]
  double tol = 1e-12;     // sup-change between sweeps, relative to sup |chi|
  int max_sweeps = 6;
};

// chi and h = sigma - u chi on levels k_n = n dk, v_j = j dk, |j| <= n.
struct KernelGrid {
  int N = 0, width = 0, seeded = 0, sweeps = 0;
  double dk = 0, rho_max = 0;
  std::vector<double> rho, dkdr, dtilde;
  std::vector<double> chi, h;
  std::vector<double> changes;      // per sweep: chi, then h interleaved
  std::vector<double> mass_defect;  // int chi dv / rho - 1 per level before the mass projection
  std::size_t idx(int n, int j) const { return std::size_t(n) * width + std::size_t(j + N); }
};

KernelGrid solve_kernel(const PressureLaw& law, const KernelOptions& opt);

double kernel_chi(const KernelGrid& g, const PressureLaw& law, double rho, double v);
double kernel_h(const KernelGrid& g, const PressureLaw& law, double rho, double v);
double kernel_mass(const KernelGrid& g, const PressureLaw& law, double rho);  // int chi dv

struct KernelOracle {
  double chi_rel = 0;        // sup |chi - closed| / sup closed, per level, one boundary cell dropped
  double h_rel = 0;          // same for sigma - u chi
  double boundary_rel = 0;   // the dropped cells
  double support = 0;        // sup |chi| outside the cone over sup |chi|
};
KernelOracle kernel_vs_closed_form(const KernelGrid& g, const PressureLaw& law);

// Thread-safe: closed forms for polytropic laws, otherwise a grid re-solved on demand.
class EntropyKernel {
 public:
  EntropyKernel(const PressureLaw& law, KernelOptions opt, bool force_grid = false);
  double chi(double rho, double v);
  double h(double rho, double v);
  const PressureLaw& law() const { return law_; }

 private:
  std::shared_ptr<const KernelGrid> ensure(double rho);
  PressureLaw law_;
  KernelOptions opt_;
  bool grid_;
  std::mutex mu_;
  std::shared_ptr<const KernelGrid> g_;
};

struct TestFunction {
  std::function<double(double)> psi;
  double lo = 0, hi = 0;  // support
};
TestFunction bump(double center, double radius);  // C^2 compact bump (1 - x^2)^3

struct WeakPair {
  double eta = 0, q = 0;
};
WeakPair weak_entropy_pair(EntropyKernel& K, const TestFunction& psi, double rho, double u);

struct MechanicalPair {
  double eta = 0, q = 0;
};
MechanicalPair mechanical_pair(const PressureLaw& law, double rho, double m);

// Growth constants on levels in [rho_lo, rho_hi].
struct KernelFits {
  double C_chi = 0;   // sup chi <= C rho
  double C_h = 0;     // sup |h| <= C rho^(1 + theta2)
  double C_eta = 0;   // |eta^psi| <= C rho
  double C_q = 0;     // |q^psi| <= C rho^(1 + theta2)
};
KernelFits kernel_growth_fits(const KernelGrid& g, const PressureLaw& law, const TestFunction& psi, double rho_lo,
                              double rho_hi);

// Relative finite-difference residual of eta_rho rho - k'^2 eta_uu for eta^psi at (rho, u), step 2 dk.
double weak_entropy_residual(const KernelGrid& g, const PressureLaw& law, const TestFunction& psi, double rho, double u);

}  // namespace sg
