#pragma once

#include <functional>
#include <string>

namespace coalsim {

enum class MeasureKind { kingman, beta, density };

// The driving measure Lambda of the coalescent. Three variants are supported:
//   kingman  - unit point mass at zero (pairwise mergers only),
//   beta     - Beta(2-alpha, alpha) with alpha in (1,2),
//   density  - f(x) dx on (0, cutoff], where f(x) / (A x^{1-alpha}) -> 1 as
//              x -> 0. The singular prefactor A drives the small-time theory.
class MeasureSpec {
 public:
  static MeasureSpec Kingman();
  static MeasureSpec Beta(double alpha);
  // singularity_rtol bounds |f(x)/(A x^{1-alpha}) - 1| at x in {1e-2,1e-4,1e-6};
  // violations are rejected at construction.
  static MeasureSpec Density(double alpha, double A, std::function<double(double)> f,
                             double cutoff = 1.0, double singularity_rtol = 0.05);

  MeasureKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double singular_coeff() const { return coeff_a_; }
  double cutoff() const { return cutoff_; }
  double total_mass() const { return total_mass_; }
  bool is_kingman() const { return kind_ == MeasureKind::kingman; }

  // Lebesgue density at x in (0,1]. Invalid for the Kingman variant.
  double density_at(double x) const;

  std::string describe() const;

  // Closed-form Beta(2-alpha, alpha) density, exposed for building Density
  // variants that wrap or rescale the beta measure.
  static double beta_density(double alpha, double x);

 private:
  MeasureSpec() = default;

  MeasureKind kind_ = MeasureKind::kingman;
  double alpha_ = 0.0;
  double coeff_a_ = 0.0;
  double cutoff_ = 1.0;
  double total_mass_ = 1.0;
  std::function<double(double)> f_;
};

}  // namespace coalsim
