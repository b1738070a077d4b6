#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace coalsim {

// Raised when quadrature or inversion cannot meet its tolerance. The CLI maps
// this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan) accumulator for long sums of like-signed terms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// 1 - (1-x)^{b-1} (1 + (b-1)x), the probability that a Bernoulli(x) mark
// vector of length b has at least two ones. Stable for b*x << 1.
inline double at_least_two_marks(double x, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double m = b - 1.0;
  return -std::expm1(m * std::log1p(-x) + std::log1p(m * x));
}

}  // namespace coalsim
