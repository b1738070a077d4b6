#include "coalsim/measure.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "coalsim/numeric.hpp"
#include "coalsim/quadrature.hpp"

namespace coalsim {

MeasureSpec MeasureSpec::Kingman() {
  MeasureSpec m;
  m.kind_ = MeasureKind::kingman;
  m.total_mass_ = 1.0;
  return m;
}

MeasureSpec MeasureSpec::Beta(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument("beta measure requires alpha in (1,2), got " +
                                std::to_string(alpha));
  }
  MeasureSpec m;
  m.kind_ = MeasureKind::beta;
  m.alpha_ = alpha;
  m.coeff_a_ = 1.0 / (std::tgamma(alpha) * std::tgamma(2.0 - alpha));
  m.total_mass_ = 1.0;
  return m;
}

MeasureSpec MeasureSpec::Density(double alpha, double A, std::function<double(double)> f,
                                 double cutoff, double singularity_rtol) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw std::invalid_argument("density measure requires alpha in (1,2)");
  }
  if (!(A > 0.0)) throw std::invalid_argument("density measure requires A > 0");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) {
    throw std::invalid_argument("density cutoff must lie in (0,1]");
  }
  if (!f) throw std::invalid_argument("density function must be callable");
  for (double x : {1e-2, 1e-4, 1e-6}) {
    if (x >= cutoff) continue;
    const double ratio = f(x) / (A * std::pow(x, 1.0 - alpha));
    if (std::fabs(ratio - 1.0) > singularity_rtol) {
      throw std::invalid_argument(
          "density does not match A x^{1-alpha} near 0: ratio " + std::to_string(ratio) +
          " at x=" + std::to_string(x));
    }
  }
  MeasureSpec m;
  m.kind_ = MeasureKind::density;
  m.alpha_ = alpha;
  m.coeff_a_ = A;
  m.cutoff_ = cutoff;
  m.f_ = std::move(f);
  m.total_mass_ = integrate_singular_left([&m](double x) { return m.f_(x); }, alpha,
                                          cutoff, 1e-10)
                      .value;
  if (!(m.total_mass_ > 0.0) || !std::isfinite(m.total_mass_)) {
    throw numerical_error("density measure has non-finite total mass");
  }
  return m;
}

double MeasureSpec::beta_density(double alpha, double x) {
  const double log_b = log_beta(2.0 - alpha, alpha);
  return std::exp((1.0 - alpha) * std::log(x) + (alpha - 1.0) * std::log1p(-x) - log_b);
}

double MeasureSpec::density_at(double x) const {
  if (kind_ == MeasureKind::kingman) {
    throw std::invalid_argument("Kingman measure has no Lebesgue density");
  }
  if (x <= 0.0 || x > 1.0) return 0.0;
  if (kind_ == MeasureKind::beta) return beta_density(alpha_, x);
  return x <= cutoff_ ? f_(x) : 0.0;
}

std::string MeasureSpec::describe() const {
  switch (kind_) {
    case MeasureKind::kingman:
      return "kingman";
    case MeasureKind::beta:
      return "beta(alpha=" + std::to_string(alpha_) + ")";
    case MeasureKind::density:
      return "density(alpha=" + std::to_string(alpha_) + ", A=" + std::to_string(coeff_a_) +
             ", cutoff=" + std::to_string(cutoff_) + ")";
  }
  return "unknown";
}

}  // namespace coalsim
