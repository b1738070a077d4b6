#pragma once

#include <functional>
#include <span>
#include <vector>

#include "coalsim/rng.hpp"

namespace coalsim {

// One-sample Kolmogorov-Smirnov statistic against a CDF callable.
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic (tie-aware).
double ks_statistic(std::span<const double> a, std::span<const double> b);

struct LaplacePoint {
  double lambda;
  double mean;       // empirical mean of e^{-lambda X}
  double std_error;  // normal-approximation SE (integrand lies in [0,1])
};

std::vector<LaplacePoint> empirical_laplace(std::span<const double> sample,
                                            std::span<const double> lambdas);

double median(std::vector<double> values);

struct MeanSE {
  double mean;
  double se;
};
MeanSE mean_se(std::span<const double> values);

struct MedianCI {
  double median;
  double lo, hi;  // bootstrap percentile interval (2.5%, 97.5%)
  double se;      // bootstrap standard error
};
MedianCI bootstrap_median(std::span<const double> values, int resamples, RngStream& rng);

}  // namespace coalsim
