#include "coalsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coalsim/numeric.hpp"

namespace coalsim {
namespace {

// One side of the coupled pair: blocks ordered by least label, merged by
// shared mark sets.
struct Side {
  std::vector<int> least;
  std::vector<int> size;
  BlockCountPath path;
  std::vector<MergeEvent> merges;

  explicit Side(int n) {
    least.resize(static_cast<std::size_t>(n));
    size.assign(static_cast<std::size_t>(n), 1);
    for (int i = 0; i < n; ++i) least[static_cast<std::size_t>(i)] = i + 1;
    path.start_count = n;
  }

  int count() const { return static_cast<int>(least.size()); }

  // merge the blocks at the marked ranks (1-based coordinates <= count)
  int apply(const std::vector<int>& marked_coords, double t) {
    thread_local std::vector<int> ranks;
    ranks.clear();
    for (int c : marked_coords) {
      if (c <= count()) ranks.push_back(c - 1);
    }
    if (ranks.size() < 2) return 0;
    const std::size_t keep = static_cast<std::size_t>(ranks.front());
    MergeEvent ev;
    ev.time = t;
    int merged = 0;
    for (int r : ranks) {
      merged += size[static_cast<std::size_t>(r)];
      ev.least_labels.push_back(least[static_cast<std::size_t>(r)]);
    }
    size[keep] = merged;
    std::size_t write = keep + 1;
    std::size_t next_removed = 1;
    for (std::size_t read = keep + 1; read < least.size(); ++read) {
      if (next_removed < ranks.size() && static_cast<std::size_t>(ranks[next_removed]) == read) {
        ++next_removed;
        continue;
      }
      least[write] = least[read];
      size[write] = size[read];
      ++write;
    }
    least.resize(write);
    size.resize(write);
    const int lost = static_cast<int>(ranks.size()) - 1;
    path.events.push_back({t, static_cast<int>(write), lost});
    merges.push_back(std::move(ev));
    return lost;
  }
};

void validate_dominated(const MeasureSpec& m1, const MeasureSpec& m2) {
  if (m1.is_kingman() || m2.is_kingman()) {
    throw std::invalid_argument(
        "coupling requires measures without an atom at zero (no Kingman)");
  }
  // log-spaced then linear mesh over the support
  for (int i = 0; i < 512; ++i) {
    const double x = std::pow(10.0, -8.0 + 8.0 * i / 511.0);
    if (m2.density_at(x) > m1.density_at(x) * (1.0 + 1e-9) + 1e-300) {
      throw std::invalid_argument("density2 exceeds density1 at x=" + std::to_string(x));
    }
  }
  for (int i = 1; i <= 512; ++i) {
    const double x = i / 512.0;
    if (m2.density_at(x) > m1.density_at(x) * (1.0 + 1e-9) + 1e-300) {
      throw std::invalid_argument("density2 exceeds density1 at x=" + std::to_string(x));
    }
  }
}

}  // namespace

CoupledTrajectory simulate_coupled_pair(const MeasureSpec& measure1,
                                        const MeasureSpec& measure2, int n,
                                        double horizon, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("coupling requires n >= 2");
  validate_dominated(measure1, measure2);
  const double alpha = measure1.alpha();
  const double cutoff = measure1.cutoff();

  // envelope constant: f1(x) <= a_env x^{1-alpha} on the support
  double a_env = 0.0;
  for (int i = 0; i < 2048; ++i) {
    const double x = std::pow(10.0, -8.0 + 8.0 * i / 2047.0) * cutoff;
    a_env = std::max(a_env, measure1.density_at(x) * std::pow(x, alpha - 1.0));
  }
  a_env *= 1.01;

  // Two-piece envelope for the x-intensity of effective atoms
  //   target(x) = P(>=2 of n marks | x) x^{-2} f1(x) <= min(C2, x^{-2}) a_env x^{1-alpha}
  const double c2 = 0.5 * n * (n - 1.0);
  const double x_split = std::min(1.0 / std::sqrt(c2), cutoff);
  const double mass1 = c2 * a_env * std::pow(x_split, 2.0 - alpha) / (2.0 - alpha);
  const double mass2 =
      x_split < cutoff
          ? a_env * (std::pow(x_split, -alpha) - std::pow(cutoff, -alpha)) / alpha
          : 0.0;
  const double envelope_rate = mass1 + mass2;

  Side side1(n), side2(n);
  CoupledTrajectory out;
  out.counts_ordered = true;
  out.first_thinned_time = std::numeric_limits<double>::quiet_NaN();

  std::vector<int> marked;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(envelope_rate);
    if (t > horizon) break;
    if (side1.count() == 1 && side2.count() == 1) break;

    // sample candidate x from the envelope
    double x;
    double envelope_density;
    if (rng.uniform() * envelope_rate < mass1) {
      x = x_split * std::pow(rng.uniform_pos(), 1.0 / (2.0 - alpha));
      envelope_density = c2 * a_env * std::pow(x, 1.0 - alpha);
    } else {
      const double u = rng.uniform();
      x = std::pow(std::pow(x_split, -alpha) -
                       u * (std::pow(x_split, -alpha) - std::pow(cutoff, -alpha)),
                   -1.0 / alpha);
      envelope_density = a_env * std::pow(x, -1.0 - alpha);
    }

    const double phi = at_least_two_marks(x, static_cast<double>(n));
    const double target = phi * measure1.density_at(x) / (x * x);
    const double ratio = target / envelope_density;
    if (ratio > 1.0 + 1e-9) {
      throw numerical_error("coupling envelope violated at x=" + std::to_string(x));
    }
    if (rng.uniform() >= ratio) continue;  // rejected candidate

    // marks: Bernoulli(x) on coordinates 1..n conditioned on >= 2 ones
    marked.clear();
    if (phi > 0.99) {
      do {
        marked.clear();
        for (int i = 1; i <= n; ++i) {
          if (rng.uniform() < x) marked.push_back(i);
        }
      } while (marked.size() < 2);
    } else {
      // sequential inversion on the conditional count, then a uniform subset
      const double log_p2 =
          log_choose(n, 2) + 2.0 * std::log(x) + (n - 2.0) * std::log1p(-x);
      double w = std::exp(log_p2);
      double cum = w;
      const double u = rng.uniform_pos() * phi;
      int m = 2;
      while (cum < u && m < n) {
        w *= (n - m) * x / ((m + 1.0) * (1.0 - x));
        cum += w;
        ++m;
      }
      // Floyd's uniform m-subset of {1..n}
      for (int i = n - m; i < n; ++i) {
        const int r = static_cast<int>(rng.uniform() * (i + 1)) + 1;
        if (std::find(marked.begin(), marked.end(), r) != marked.end()) {
          marked.push_back(i + 1);
        } else {
          marked.push_back(r);
        }
      }
      std::sort(marked.begin(), marked.end());
    }

    const bool applies2 = rng.uniform() < measure2.density_at(x) / measure1.density_at(x);
    const int lost1 = side1.apply(marked, t);
    const int lost2 = applies2 ? side2.apply(marked, t) : 0;
    if (!applies2 && std::isnan(out.first_thinned_time)) out.first_thinned_time = t;
    if (side1.count() > side2.count()) out.counts_ordered = false;
    out.atoms.push_back({t, x, applies2, lost1, lost2});
  }

  out.path1 = std::move(side1.path);
  out.path2 = std::move(side2.path);
  out.merges1 = std::move(side1.merges);
  out.merges2 = std::move(side2.merges);
  return out;
}

}  // namespace coalsim
