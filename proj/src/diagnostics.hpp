// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Energy and BD functionals of a radial state, the Sobolev check, and the
// epsilon / domain sweeps.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kernel.hpp"
#include "solver.hpp"

namespace sg {

// R^3 integrals (factor omega3) for the energies; BD terms per unit solid angle.
struct EnergyFunctionals {
  double E_kin = 0, E_int = 0, E_grav = 0;   // E_grav = |grad Phi|^2 / 2
  double grad_phi_sq = 0;                    // |grad Phi|^2_{L^2(R^3)}
  double phi_L6 = 0;                         // |Phi|_{L^6(R^3)}, Phi -> 0 at infinity
  double W = 0;                              // int x/r dx = int_0^r rho z^2 dz rho r dr
  double W_scheme = 0;                       // omega3 sum m_e x_e / r_e
  double bd_grad = 0;                        // eps^2 int |(sqrt rho)_r|^2 r^2 dr
  double bd_rate = 0;                        // int (P'/rho) |rho_r|^2 r^2 dr
  double bd_boundary = 0;                    // P(rho(b)) b^3 / 3
  double dissipation_rate = 0;               // omega3 [eps int rho (u_r^2 + 2u^2/r^2) r^2 + 2 eps rho u^2 b]
  double rho_u2 = 0;                         // int rho u^2 r^2 dr
};

EnergyFunctionals energy_functionals(const RadialState& s, const PressureLaw& law);

// |grad Phi|^2 / (A3 |rho|^2_{6/5}) for the piecewise-constant density.
double sobolev_check(const RadialState& s);

// (r^3 - a^3)^2 / r^2 integrated in closed form: E_grav of a uniform shell a < r < R, with the exterior.
double uniform_ball_egrav(double rho, double a, double R);

struct Window {
  double d = 0.1, D = -1.0;  // D <= 0: 0.8 min_run b(t)
  int points = 2001;
};

// r^2-weighted L^1 distance of (rho, m) on [d, D], averaged over the common snapshot times.
double window_l1(const RunResult& x, const RunResult& y, double d, double D, int points);

struct SweepRun {
  double param = 0;
  bool failed = false;
  std::string failure;
  double final_b = 0, min_b = 0, max_mass_drift = 0, max_residual = 0;
  double bound_energy = 0, bound_bd = 0, bound_u3 = 0, bound_rho_g2 = 0, bound_bd_full = 0, bound_rhoP = 0;
};

struct SweepResult {
  std::string axis;  // "eps" or "b"
  std::vector<SweepRun> runs;
  double d = 0, D = 0;
  std::vector<std::vector<double>> diff;   // pairwise window L^1
  std::vector<double> consecutive;
  bool monotone = false;                   // consecutive[k+1] <= 1.1 consecutive[k]
  double rate = 0;                         // slope of log consecutive vs log param
  // max over runs / value at the first run, and max/min, in the order of the SweepRun bounds
  std::vector<double> growth, spread;
  bool partial = false;
};

SweepResult epsilon_sweep(const SolverSpec& spec, const PressureLaw& law, const std::vector<double>& eps_list,
                          const Window& w, const OutputPolicy& out = {});
SweepResult domain_sweep(const SolverSpec& spec, const PressureLaw& law, const std::vector<double>& b_list,
                         const Window& w, const OutputPolicy& out = {});

// Entropy pair evaluated at (rho, u); eta_rho and eta_m are taken in (rho, m).
struct PairValue {
  double eta = 0, q = 0, eta_rho = 0, eta_m = 0;
};
using PairFn = std::function<PairValue(double rho, double u)>;
PairFn mechanical_pair_fn(const PressureLaw& law);
// eta^psi, q^psi from the kernel; derivatives by central differences in (rho, m).
PairFn weak_pair_fn(EntropyKernel& K, const TestFunction& psi);

// Window-integrated weak divergence of (r^2 eta, r^2 q) against a bump on [d, D],
// and the geometric, gravity and viscous source terms.
struct DissipationProbe {
  double divergence = 0;
  double I_geom = 0, I_grav = 0, I_visc = 0;
  double residual = 0;  // |divergence - sum of sources| / scale
  double scale = 0;
};

DissipationProbe entropy_dissipation_probe(const std::vector<Snapshot>& traj, const PairFn& pair, double d, double D,
                                           int points = 2001);

}  // namespace sg
