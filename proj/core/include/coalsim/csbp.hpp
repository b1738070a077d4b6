#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coalsim/mu_dist.hpp"
#include "coalsim/rng.hpp"

namespace coalsim {

// u_t(lambda) = [(alpha-1) t + lambda^{1-alpha}]^{-1/(alpha-1)}, the Laplace
// exponent of the alpha-stable CSBP transition: E[e^{-lambda Z(t)} | Z(0)=a]
// = e^{-a u_t(lambda)}.
double csbp_u(double alpha, double t, double lambda);

// theta_t = [(alpha-1) t]^{-1/(alpha-1)} = lim_{lambda->inf} u_t(lambda); the
// number of atoms of M_t is Poisson(a theta_t).
double csbp_theta(double alpha, double t);

struct Atom {
  std::int64_t id;
  double mass;
};

// Atoms of the measure M_t: masses of the time-zero ancestors with living
// descendants. Atom count never increases under evolution.
struct AtomSystem {
  double alpha = 0.0;
  double grid_time = 0.0;
  std::vector<Atom> atoms;
  double total_mass = 0.0;

  int count() const { return static_cast<int>(atoms.size()); }
};

// Largest atom mass, 0 if extinct.
double largest_atom(const AtomSystem& system);

// Exact draw of M_t started from mass a: Poisson(a theta_t) atoms with i.i.d.
// masses theta_t^{-1} X, X ~ mu. Throws numerical_error if a*theta_t exceeds
// the Poisson-mean cap of 1e7 (choose a later first grid point instead).
AtomSystem sample_atoms(double alpha, double t, double a, const MuTable& mu,
                        RngStream& rng);

// Exact transition over a further time s: each atom of mass a independently
// becomes a compound-Poisson draw with Poisson(a theta_s) summands of size
// theta_s^{-1} X; atoms whose draw is empty die. Ids persist.
AtomSystem evolve_atoms(const AtomSystem& system, double s, const MuTable& mu,
                        RngStream& rng);

// The coalescent clock R(t) = alpha (alpha-1) Gamma(alpha) int_0^t Z(s)^{1-alpha} ds,
// accumulated by the trapezoid rule on the grid, with inverse lookup
// R^{-1}(t) = inf{s : R(s) > t} by monotone interpolation.
struct TimeChangePath {
  std::vector<double> grid;      // s_0 < s_1 < ...
  std::vector<double> z_values;  // Z at the grid
  std::vector<double> r_values;  // R at the grid
  bool truncated = false;        // Z hit 0 inside the requested range

  double r_of(double s) const;
  // NaN when t lies beyond the accumulated range
  double r_inverse(double t) const;
};

// Builds the clock from Z sampled on a grid. If the grid starts after 0, the
// initial segment uses the known starting mass.
TimeChangePath time_change(std::span<const double> grid, std::span<const double> z_values,
                           double alpha, double initial_mass = 1.0);

// The cost of one exact transition over a step ds from total mass Z is
// Z * theta_ds summand draws, and theta_ds ~ ds^{-1/(alpha-1)}, so the grid
// uses the largest steps the clock quadrature tolerates: E[Z(s)^{1-alpha}] is
// linear in s to first order, which the trapezoid integrates exactly.
struct CsbpDualConfig {
  double theta_start = 2.5e5;   // theta at the first grid point
  double uniform_step = 0.008;  // grid step beyond the first point
  double horizon_factor = 2.5;  // simulate to ~ this multiple of the expected R^{-1}(t)
  double theta_cap = 1e7;
};

struct DualDraw {
  bool ok = false;
  int atom_count = 0;
  double largest_norm_freq = 0.0;  // largest mass / total mass
  double r_inverse = 0.0;
};

// One replicate of the duality pipeline: simulate the atom system from mass a,
// accumulate R, locate s* = R^{-1}(t_target), and evolve the last pre-s* state
// exactly to s*. Transitions are exact; only the clock quadrature is
// approximate.
DualDraw run_csbp_dual(double alpha, double a, double t_target, const MuTable& mu,
                       const CsbpDualConfig& config, RngStream& rng);

}  // namespace coalsim
