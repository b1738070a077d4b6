#include "coalsim/rates.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

#include "coalsim/numeric.hpp"
#include "coalsim/quadrature.hpp"

namespace coalsim {
namespace {

std::uint64_t weight_key(int b, int j) {
  return (static_cast<std::uint64_t>(b) << 24) | static_cast<std::uint64_t>(j);
}

void check_bk(int b, int k) {
  if (k < 2 || k > b) {
    throw std::invalid_argument("lambda_bk requires 2 <= k <= b, got b=" +
                                std::to_string(b) + " k=" + std::to_string(k));
  }
}

// lambda_{b,k} for a density measure by quadrature with the x^{1-alpha}
// singularity flattened. For large b the mass sits in a layer of width ~1/b
// near zero, so we substitute y = b x and truncate the exponentially small
// remainder beyond y = 60 + k.
double density_lambda_bk(const MeasureSpec& m, int b, int k) {
  const double alpha = m.alpha();
  const double c = m.cutoff();
  auto integrand = [&](double x) {
    return std::pow(x, k - 2.0) * std::exp((b - k) * std::log1p(-x)) * m.density_at(x);
  };
  const double y_star = 60.0 + k;
  if (b <= 64 || b * c <= y_star) {
    return integrate_singular_left(integrand, alpha, c, 1e-10).value;
  }
  const double x_star = y_star / b;
  double head = integrate_singular_left(integrand, alpha, x_star, 1e-10).value;
  // remainder is bounded by (1-x_star)^{b-k} * mass; negligible by choice of
  // y_star, but we keep it for small-b robustness
  double tail = integrate(integrand, x_star, c, 1e-8, head * 1e-13, 4000, true).value;
  return head + tail;
}

}  // namespace

double lambda_bk(const MeasureSpec& measure, int b, int k) {
  check_bk(b, k);
  switch (measure.kind()) {
    case MeasureKind::kingman:
      return k == 2 ? 1.0 : 0.0;
    case MeasureKind::beta: {
      const double a = measure.alpha();
      return std::exp(log_beta(k - a, b - k + a) - log_beta(2.0 - a, a));
    }
    case MeasureKind::density:
      return density_lambda_bk(measure, b, k);
  }
  return 0.0;
}

double limit_zeta(double alpha, int k) {
  if (k < 1) throw std::invalid_argument("limit_zeta requires k >= 1");
  return std::exp(std::log(alpha) + std::lgamma(k + 1.0 - alpha) -
                  std::lgamma(k + 2.0) - std::lgamma(2.0 - alpha));
}

RateCache::RateCache(MeasureSpec measure) : measure_(std::move(measure)) {
  totals_.assign(3, 0.0);
  lam2_.assign(3, 0.0);
  totals_[2] = measure_.total_mass();  // lambda_2 = lambda_{2,2} = Lambda([0,1])
  lam2_[2] = measure_.total_mass();
  filled_ = 3;
}

void RateCache::fill_locked(int b) {
  const std::size_t need = static_cast<std::size_t>(b) + 1;
  if (totals_.size() < need) {
    totals_.resize(need, 0.0);
    lam2_.resize(need, 0.0);
  }
  if (measure_.kind() == MeasureKind::kingman) {
    for (int i = filled_; i <= b; ++i) {
      totals_[i] = 0.5 * i * (i - 1.0);
      lam2_[i] = 1.0;
    }
  } else if (measure_.kind() == MeasureKind::beta) {
    const double a = measure_.alpha();
    // lambda_{i,2} ladder: lambda_{i+1,2}/lambda_{i,2} = (i-2+alpha)/i,
    // total ladder: lambda_{i+1} = lambda_i + i lambda_{i+1,2}; both are
    // algebraic consequences of Eq-level identities among the rates.
    for (int i = filled_; i <= b; ++i) {
      lam2_[i] = lam2_[i - 1] * (i - 3.0 + a) / (i - 1.0);
      totals_[i] = totals_[i - 1] + (i - 1.0) * lam2_[i];
    }
  } else {
    for (int i = filled_; i <= b; ++i) {
      lam2_[i] = density_lambda_bk(measure_, i, 2);
      totals_[i] = totals_[i - 1] + (i - 1.0) * lam2_[i];
    }
  }
  filled_ = b + 1;
}

void RateCache::ensure_totals_upto(int b) {
  if (b < 2) return;
  std::unique_lock lock(mutex_);
  if (b < filled_) return;
  fill_locked(b);
}

double RateCache::total_rate(int b) {
  if (b < 2) throw std::invalid_argument("total_rate requires b >= 2");
  {
    std::shared_lock lock(mutex_);
    if (b < filled_) return totals_[b];
  }
  std::unique_lock lock(mutex_);
  if (b >= filled_) fill_locked(b);
  return totals_[b];
}

double RateCache::lambda2(int b) {
  if (b < 2) throw std::invalid_argument("lambda2 requires b >= 2");
  {
    std::shared_lock lock(mutex_);
    if (b < filled_) return lam2_[b];
  }
  std::unique_lock lock(mutex_);
  if (b >= filled_) fill_locked(b);
  return lam2_[b];
}

double RateCache::merge_weight_uncached(int b, int j) const {
  return std::exp(log_choose(b, j) + std::log(density_lambda_bk(measure_, b, j)));
}

double RateCache::merge_weight(int b, int j) {
  check_bk(b, j);
  if (measure_.kind() == MeasureKind::kingman) {
    return j == 2 ? 0.5 * b * (b - 1.0) : 0.0;
  }
  if (measure_.kind() == MeasureKind::beta) {
    if (j == 2) return 0.5 * b * (b - 1.0) * lambda2(b);
    const double a = measure_.alpha();
    return std::exp(log_choose(b, j) + log_beta(j - a, b - j + a) - log_beta(2.0 - a, a));
  }
  const std::uint64_t key = weight_key(b, j);
  {
    std::shared_lock lock(mutex_);
    auto it = weights_.find(key);
    if (it != weights_.end()) return it->second;
  }
  const double w = merge_weight_uncached(b, j);
  std::unique_lock lock(mutex_);
  return weights_.emplace(key, w).first->second;
}

double RateCache::total_rate_direct(int b) const {
  if (b < 2) throw std::invalid_argument("total_rate requires b >= 2");
  if (measure_.kind() == MeasureKind::kingman) return 0.5 * b * (b - 1.0);
  KahanSum sum;
  if (measure_.kind() == MeasureKind::beta) {
    const double a = measure_.alpha();
    // seed w_2 = C(b,2) lambda_{b,2}; then
    // w_{j+1}/w_j = (b-j)(j-alpha) / ((j+1)(b-j-1+alpha)).
    double w = std::exp(std::log(0.5 * b * (b - 1.0)) + std::lgamma(b - 2.0 + a) -
                        std::lgamma(static_cast<double>(b)) - std::lgamma(a));
    sum.add(w);
    for (int j = 2; j < b; ++j) {
      w *= (b - j) * (j - a) / ((j + 1.0) * (b - j - 1.0 + a));
      sum.add(w);
    }
    return sum.value();
  }
  for (int j = 2; j <= b; ++j) {
    sum.add(std::exp(log_choose(b, j) + std::log(density_lambda_bk(measure_, b, j))));
  }
  return sum.value();
}

std::vector<double> jump_distribution(RateCache& cache, int n) {
  if (n < 2) throw std::invalid_argument("jump_distribution requires n >= 2");
  std::vector<double> row(static_cast<std::size_t>(n) - 1, 0.0);
  const MeasureSpec& m = cache.measure();
  if (m.kind() == MeasureKind::kingman) {
    row[0] = 1.0;
    return row;
  }
  KahanSum sum;
  if (m.kind() == MeasureKind::beta) {
    const double a = m.alpha();
    double w = 0.5 * n * (n - 1.0) * cache.lambda2(n);
    row[0] = w;
    sum.add(w);
    for (int j = 2; j < n; ++j) {
      w *= (n - j) * (j - a) / ((j + 1.0) * (n - j - 1.0 + a));
      row[static_cast<std::size_t>(j) - 1] = w;
      sum.add(w);
    }
  } else {
    for (int j = 2; j <= n; ++j) {
      const double w = cache.merge_weight(n, j);
      row[static_cast<std::size_t>(j) - 2] = w;
      sum.add(w);
    }
  }
  const double total = sum.value();
  for (double& v : row) v /= total;
  return row;
}

int sample_blocks_lost(RateCache& cache, int b, RngStream& rng) {
  if (b < 2) throw std::invalid_argument("sample_blocks_lost requires b >= 2");
  const MeasureSpec& m = cache.measure();
  if (m.kind() == MeasureKind::kingman || b == 2) return 1;
  const double target = rng.uniform_pos() * cache.total_rate(b);
  if (m.kind() == MeasureKind::beta) {
    const double a = m.alpha();
    double w = 0.5 * b * (b - 1.0) * cache.lambda2(b);
    double cum = w;
    int j = 2;
    while (cum < target && j < b) {
      w *= (b - j) * (j - a) / ((j + 1.0) * (b - j - 1.0 + a));
      cum += w;
      ++j;
    }
    return j - 1;
  }
  double cum = 0.0;
  for (int j = 2; j <= b; ++j) {
    cum += cache.merge_weight(b, j);
    if (cum >= target) return j - 1;
  }
  return b - 1;
}

}  // namespace coalsim
