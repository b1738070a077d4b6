#include "coalsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coalsim {

double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic requires a nonempty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_statistic requires nonempty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double v = (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<LaplacePoint> empirical_laplace(std::span<const double> sample,
                                            std::span<const double> lambdas) {
  if (sample.empty()) throw std::invalid_argument("empirical_laplace requires a sample");
  std::vector<LaplacePoint> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    if (lam < 0.0) throw std::invalid_argument("empirical_laplace requires lambda >= 0");
    double sum = 0.0, sq = 0.0;
    for (double x : sample) {
      const double v = std::exp(-lam * x);
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(sample.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sq / n - mean * mean);
    out.push_back({lam, mean, std::sqrt(var / n)});
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

MeanSE mean_se(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_se of empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = values.size() > 1 ? std::sqrt(ss / (n * (n - 1.0))) : 0.0;
  return {mean, se};
}

MedianCI bootstrap_median(std::span<const double> values, int resamples, RngStream& rng) {
  if (values.empty()) throw std::invalid_argument("bootstrap_median of empty set");
  std::vector<double> meds(static_cast<std::size_t>(resamples));
  std::vector<double> draw(values.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& v : draw) {
      v = values[static_cast<std::size_t>(rng.uniform() * values.size())];
    }
    meds[static_cast<std::size_t>(r)] = median(draw);
  }
  std::sort(meds.begin(), meds.end());
  const auto q = [&meds](double p) {
    const double idx = p * (meds.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(idx);
    const double w = idx - static_cast<double>(lo);
    return lo + 1 < meds.size() ? meds[lo] * (1.0 - w) + meds[lo + 1] * w : meds[lo];
  };
  MedianCI ci;
  ci.median = median(std::vector<double>(values.begin(), values.end()));
  ci.lo = q(0.025);
  ci.hi = q(0.975);
  ci.se = mean_se(meds).se * std::sqrt(static_cast<double>(meds.size()));
  return ci;
}

}  // namespace coalsim
