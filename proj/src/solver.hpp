// SPDX-License-Identifier: MIT
// Copyright (c) 2026 selfgrav contributors
//
// Viscous self-gravitating gas in a ball with a free outer boundary, in
// Lagrangian mass coordinates on a staggered grid.
#pragma once

#include <string>
#include <vector>

#include "eos.hpp"

namespace sg {

// Non-monotone radii or density under the floor.
struct BlowupError : NumericalError {
  BlowupError(const std::string& what, int cell) : NumericalError(what), cell(cell) {}
  int cell;
};

enum class Profile { BumpShell, BumpUniform, Hydrostatic };
const char* profile_name(Profile p);

struct SolverSpec {
  double M = 1.0;
  double b = 100.0;       // initial outer radius; inner radius a = 1/b
  double eps = 0.05;
  int N = 1024;
  double T = 1.0;
  double cfl = 0.4;
  double dt_growth = 1.2;  // max ratio between consecutive steps
  long max_steps = 10000000;
  int max_rejections = 30;

  Profile profile = Profile::BumpShell;
  double bump_radius = 1.0;
  double shell_fraction = 0.1;  // mass share of the outer shell
  double floor_fraction = 0.01; // mass share of the low plateau between bump and shell

  double d = 0.1, D = -1.0;     // accumulator window; D <= 0: 0.8 b
};

// Throws ConfigError for a spec the solver cannot run.
void validate_spec(const SolverSpec& spec, const PressureLaw& law);

// Edges e = 0..N (r[0] = a, u[0] = 0); cells j = 0..N-1 between edges j and j+1.
struct RadialState {
  int N = 0;
  double dx = 0, a = 0, eps = 0, tau = 0;
  double rho_floor = 0;  // densities below this abort the run
  std::vector<double> r, u, rho;

  double b() const { return r.back(); }
  double mass() const;                      // omega3 sum rho_j V_j
  double volume(int j) const;               // (r_{j+1}^3 - r_j^3)/3
  double center(int j) const;               // radius halving the cell volume
};

double alpha_exponent(const PressureLaw& law);  // min(1/2, 3(gamma1-1)/gamma1)

struct InitialData {
  RadialState state;
  double E0 = 0;           // omega3 int rho0 (u0^2/2 + e(rho0)) r^2 dr of the smooth profile
  double E1 = 0;           // omega3 eps^2 int |(sqrt rho0)_r|^2 r^2 dr
  double E0_discrete = 0;  // omega3 sum dx e(rho_j)
  double rho_b = 0;        // rho0(b)
  double alpha = 0;
  double amplitude = 0;    // bump amplitude after normalization
  double shell_p = 0, floor_delta = 0;
  Profile profile = Profile::BumpShell;
};

double profile_density(const InitialData& id, double bump_radius, double r);
InitialData build_initial_data(const SolverSpec& spec, const PressureLaw& law);

std::vector<double> gravity(const RadialState& s);  // Phi_r at every edge

struct StepInfo {
  bool accepted = true;
  double dt_limit = 0;   // stable step at the new state
  double visc_work = 0;  // dt eps sum S_j D_j at the new velocity
  double nc_work = 0;    // work of -2 eps r rho_x u, stage average
};

double stable_dt(const RadialState& s, const PressureLaw& law, double cfl);
// One explicit Heun stage for pressure, gravity and -2 eps r rho_x u, then backward
// Euler for the viscous flux. The state is untouched when the step is rejected.
StepInfo step(RadialState& s, double dt, const PressureLaw& law, double cfl = 0.4);

struct LedgerRow {
  double tau = 0, mass = 0;
  double E_total = 0, E_kinetic = 0, E_internal = 0, E_grav = 0;
  double BD = 0, rho_boundary = 0, b = 0, dt = 0;
  double acc_rhoP = 0, acc_u3 = 0;           // int int rho P r^2 (r >= d), rho |u|^3 r^2 ([d, D])
  double acc_rho_g2 = 0;                     // int int rho^(gamma2 + 1) r^2 (r >= d)
  double E_total_plus = 0;                   // E_kinetic + E_internal + E_grav
  double dissipation = 0;                    // omega3 int_0^tau [eps int rho (u_r^2 + 2u^2/r^2) r^2 + 2 eps rho u^2 b]
  double residual = 0;                       // E_total - E_total(0) + dissipation
  double residual_scheme = 0;                // same with the scheme's own work and potential
  double sobolev = 0;
  double rho_lower = 0;                      // lower bound on the boundary density at tau
  double bound_energy = 0, bound_bd = 0, bound_energy_plain = 0;
};

struct Snapshot {
  double tau = 0;
  RadialState state;
};

struct OutputPolicy {
  int snapshots = 8;         // geometric: T 2^-k, k = snapshots-1..0, plus tau = 0
  bool uniform = false;      // evenly spaced instead
  int ledger_stride = 1;     // keep every k-th step (first and last always kept)
  bool keep_snapshots = true;
};

struct RunResult {
  InitialData init;
  std::vector<LedgerRow> ledger;
  std::vector<Snapshot> snapshots;
  long steps = 0, rejections = 0;
  bool failed = false;
  std::string failure;
  int failure_cell = -1;

  double max_mass_drift = 0;        // relative
  double max_residual = 0;          // |residual| / E0
  double max_residual_scheme = 0;
  double min_b_ratio = 1;           // min b(t)/b(0)
  double min_lower_margin = 0;      // min rho_boundary / rho_lower - 1 at snapshots
  long boundary_increases = 0;      // steps where the outer-cell density grew
  double max_sobolev = 0;
  double b_from_velocity = 0;       // b + int u(s, b(s)) ds, trapezoid
  double C_tilde = 0;
  // sup over the run of the functional bounds
  double bound_energy = 0, bound_bd = 0, bound_u3 = 0, bound_rho_g2 = 0;
  double bound_bd_full = 0, bound_rhoP = 0, bound_energy_plain = 0;
};

RunResult run(const SolverSpec& spec, const PressureLaw& law, const OutputPolicy& out = {});
RunResult run_from(const SolverSpec& spec, const PressureLaw& law, InitialData init, const OutputPolicy& out = {});

}  // namespace sg
