#pragma once

#include <string>
#include <vector>

#include "coalsim/rng.hpp"

namespace coalsim {

// Laplace transform of mu:  E[e^{-lambda X}] = 1 - (1 + lambda^{1-alpha})^{-1/(alpha-1)}.
// mu is the limit law of rescaled block sizes; it has mean 1, infinite
// variance, and tail P(X > x) ~ x^{-alpha} / Gamma(2-alpha).
double laplace_mu(double alpha, double lambda);

// Laplace transform of the size-biased law x mu(dx):
//   (1 + lambda^{alpha-1})^{-alpha/(alpha-1)}  ( = -d/dlambda laplace_mu ).
double laplace_size_biased(double alpha, double lambda);

// Survival of the analytic tail: x^{-alpha} / Gamma(2-alpha).
double mu_tail(double alpha, double x);

struct MuTableConfig {
  double x_min = 1e-4;
  int points_per_decade = 120;
  int min_points = 400;
  double tail_rtol = 0.02;          // required table/tail agreement at the switch point
  double tail_survival_max = 1e-3;  // 1 - F(switch_point) must not exceed this
  int euler_terms = 18;             // M in the Euler inversion (2M+1 transform evaluations)
};

// Tabulated CDF of mu on a geometric grid, with the analytic tail stitched on
// beyond switch_point. Immutable after construction; concurrent reads are safe.
struct MuTable {
  double alpha = 0.0;
  std::vector<double> x;    // increasing abscissae, x.front() <= 1e-4
  std::vector<double> cdf;  // strictly increasing, cdf.back() = F(switch_point)
  double tail_coeff = 0.0;  // 1 / Gamma(2-alpha)
  double tail_exponent = 0.0;
  double switch_point = 0.0;

  double cdf_at(double value) const;
  double quantile(double p) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform_pos()); }

  // trapezoidal integral of the survival function (table + analytic tail);
  // equals E[X] = 1 up to tabulation error
  double mean_estimate() const;
};

// Builds the table by numerically inverting lambda -> laplace_mu(alpha,lambda)/lambda
// (Euler-accelerated Bromwich sum) at each grid point, then stitching the
// analytic tail where table and tail agree within tail_rtol. Throws
// numerical_error with diagnostics if the inversion is non-monotone beyond
// tolerance or no valid switch point exists.
MuTable build_mu_table(double alpha, const MuTableConfig& config = {});

double quantile_mu(const MuTable& table, double p);
double sample_mu(const MuTable& table, RngStream& rng);

// Versioned CSV (columns x,F) plus JSON header (alpha, tail_coeff,
// switch_point, ...) for caching tables across runs.
void save_mu_table(const MuTable& table, const std::string& csv_path,
                   const std::string& json_path);
MuTable load_mu_table(const std::string& csv_path, const std::string& json_path);

}  // namespace coalsim
