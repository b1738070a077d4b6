#include "coalsim/quadrature.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "coalsim/numeric.hpp"

namespace coalsim {
namespace {

// Gauss-Kronrod 7-15 node/weight table: {abscissa, Gauss weight, Kronrod weight}.
constexpr double kGK15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

std::pair<double, double> gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double y0 = f(mid);
  double g7 = kGK15[0][1] * y0;
  double k15 = kGK15[0][2] * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kGK15[i][0];
    const double yi = f(mid + dx) + f(mid - dx);
    g7 += kGK15[i][1] * yi;
    k15 += kGK15[i][2] * yi;
  }
  g7 *= half;
  k15 *= half;
  double err = 200.0 * std::fabs(k15 - g7);
  err *= std::min(1.0, std::sqrt(err));
  if (!std::isfinite(err)) err = std::fabs(k15 - g7);
  return {k15, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, int max_intervals,
                           bool no_throw) {
  struct Interval {
    double a, b, value, error;
  };
  auto [v0, e0] = gk15(f, a, b);
  std::vector<Interval> heap{{a, b, v0, e0}};
  double total = v0;
  double total_err = e0;
  int splits = 0;
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (++splits > max_intervals) {
      if (no_throw) return {total, total_err, false};
      throw numerical_error("quadrature did not converge: error " +
                            std::to_string(total_err) + " on value " +
                            std::to_string(total));
    }
    // split the interval with the largest error estimate
    std::size_t worst = 0;
    for (std::size_t i = 1; i < heap.size(); ++i) {
      if (heap[i].error > heap[worst].error) worst = i;
    }
    const Interval cur = heap[worst];
    const double mid = 0.5 * (cur.a + cur.b);
    auto [vl, el] = gk15(f, cur.a, mid);
    auto [vr, er] = gk15(f, mid, cur.b);
    total += vl + vr - cur.value;
    total_err += el + er - cur.error;
    heap[worst] = {cur.a, mid, vl, el};
    heap.push_back({mid, cur.b, vr, er});
  }
  return {total, total_err, true};
}

QuadratureResult integrate_singular_left(const std::function<double(double)>& f,
                                         double alpha, double b, double rel_tol) {
  const double p = 2.0 - alpha;        // x = u^{1/p}
  const double inv_p = 1.0 / p;
  const double u_max = std::pow(b, p);
  auto g = [&](double u) {
    const double x = std::pow(u, inv_p);
    // dx = (1/p) u^{1/p - 1} du; the x^{1-alpha} factor in f makes the
    // product bounded as u -> 0.
    return f(x) * inv_p * std::pow(u, inv_p - 1.0);
  };
  return integrate(g, 0.0, u_max, rel_tol);
}

}  // namespace coalsim
