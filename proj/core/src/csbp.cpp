#include "coalsim/csbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coalsim/numeric.hpp"

namespace coalsim {

double csbp_u(double alpha, double t, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("csbp_u requires lambda > 0");
  if (t < 0.0) throw std::invalid_argument("csbp_u requires t >= 0");
  return std::pow((alpha - 1.0) * t + std::pow(lambda, 1.0 - alpha), -1.0 / (alpha - 1.0));
}

double csbp_theta(double alpha, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("csbp_theta requires t > 0");
  return std::pow((alpha - 1.0) * t, -1.0 / (alpha - 1.0));
}

double largest_atom(const AtomSystem& system) {
  double best = 0.0;
  for (const auto& a : system.atoms) best = std::max(best, a.mass);
  return best;
}

namespace {

// sample_atoms bounds the first-grid-point Poisson mean (theta_s explodes as
// s -> 0, so grids must start late enough); evolve_atoms only rejects means
// whose summand loop could not finish in any reasonable time.
constexpr double kPoissonMeanCap = 1e7;
constexpr double kEvolveMeanCap = 1e10;

double compound_draw(double mean, double inv_theta, const MuTable& mu, RngStream& rng,
                     std::int64_t* summands) {
  const std::int64_t k = rng.poisson(mean);
  if (summands) *summands = k;
  double mass = 0.0;
  for (std::int64_t i = 0; i < k; ++i) mass += mu.sample(rng);
  return mass * inv_theta;
}

}  // namespace

AtomSystem sample_atoms(double alpha, double t, double a, const MuTable& mu,
                        RngStream& rng) {
  if (!(a > 0.0)) throw std::invalid_argument("sample_atoms requires initial mass a > 0");
  if (mu.alpha != alpha) throw std::invalid_argument("mu table alpha mismatch");
  const double theta = csbp_theta(alpha, t);
  if (a * theta > kPoissonMeanCap) {
    throw numerical_error("sample_atoms: a*theta_t = " + std::to_string(a * theta) +
                          " exceeds the Poisson-mean cap; start the grid later");
  }
  AtomSystem sys;
  sys.alpha = alpha;
  sys.grid_time = t;
  const std::int64_t count = rng.poisson(a * theta);
  sys.atoms.reserve(static_cast<std::size_t>(count));
  const double inv_theta = 1.0 / theta;
  KahanSum total;
  for (std::int64_t i = 0; i < count; ++i) {
    const double mass = inv_theta * mu.sample(rng);
    sys.atoms.push_back({i, mass});
    total.add(mass);
  }
  sys.total_mass = total.value();
  return sys;
}

AtomSystem evolve_atoms(const AtomSystem& system, double s, const MuTable& mu,
                        RngStream& rng) {
  if (!(s > 0.0)) throw std::invalid_argument("evolve_atoms requires s > 0");
  if (mu.alpha != system.alpha) throw std::invalid_argument("mu table alpha mismatch");
  const double theta = csbp_theta(system.alpha, s);
  const double inv_theta = 1.0 / theta;
  AtomSystem next;
  next.alpha = system.alpha;
  next.grid_time = system.grid_time + s;
  next.atoms.reserve(system.atoms.size());
  KahanSum total;
  for (const auto& atom : system.atoms) {
    if (atom.mass <= 0.0) continue;
    const double mean = atom.mass * theta;
    if (mean > kEvolveMeanCap) {
      throw numerical_error("evolve_atoms: step too small, Poisson mean " +
                            std::to_string(mean));
    }
    const double mass = compound_draw(mean, inv_theta, mu, rng, nullptr);
    if (mass > 0.0) {
      next.atoms.push_back({atom.id, mass});
      total.add(mass);
    }
  }
  next.total_mass = total.value();
  return next;
}

double TimeChangePath::r_of(double s) const {
  if (grid.empty() || s < grid.front() || s > grid.back()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto it = std::lower_bound(grid.begin(), grid.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  if (grid[i] == s) return r_values[i];
  const double w = (s - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return r_values[i - 1] + w * (r_values[i] - r_values[i - 1]);
}

double TimeChangePath::r_inverse(double t) const {
  if (r_values.empty() || t > r_values.back() || t < r_values.front()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const auto it = std::lower_bound(r_values.begin(), r_values.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - r_values.begin());
  if (r_values[i] == t) return grid[i];
  const double w = (t - r_values[i - 1]) / (r_values[i] - r_values[i - 1]);
  return grid[i - 1] + w * (grid[i] - grid[i - 1]);
}

TimeChangePath time_change(std::span<const double> grid, std::span<const double> z_values,
                           double alpha, double initial_mass) {
  if (grid.size() != z_values.size() || grid.empty()) {
    throw std::invalid_argument("time_change requires matching non-empty grids");
  }
  const double c = alpha * (alpha - 1.0) * std::tgamma(alpha);
  TimeChangePath path;
  path.grid.assign(grid.begin(), grid.end());
  path.z_values.assign(z_values.begin(), z_values.end());
  path.r_values.resize(grid.size());
  auto integrand = [alpha](double z) { return std::pow(z, 1.0 - alpha); };
  double r = 0.0;
  if (grid.front() > 0.0) {
    r = c * grid.front() * 0.5 * (integrand(initial_mass) + integrand(z_values.front()));
  }
  path.r_values.front() = r;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (path.grid[i] <= path.grid[i - 1]) {
      throw std::invalid_argument("time_change grid must be strictly increasing");
    }
    if (z_values[i] <= 0.0) {
      path.truncated = true;
      path.grid.resize(i);
      path.z_values.resize(i);
      path.r_values.resize(i);
      break;
    }
    r += c * (path.grid[i] - path.grid[i - 1]) * 0.5 *
         (integrand(z_values[i - 1]) + integrand(z_values[i]));
    path.r_values[i] = r;
  }
  return path;
}

DualDraw run_csbp_dual(double alpha, double a, double t_target, const MuTable& mu,
                       const CsbpDualConfig& config, RngStream& rng) {
  const double c = alpha * (alpha - 1.0) * std::tgamma(alpha);
  // first grid point from the requested starting theta (capped)
  const double theta0 = std::min(config.theta_start, config.theta_cap / a);
  const double s1 = std::pow(theta0, -(alpha - 1.0)) / (alpha - 1.0);
  const double s_horizon = config.horizon_factor * t_target / c;

  AtomSystem current = sample_atoms(alpha, s1, a, mu, rng);
  auto z_pow = [alpha](double z) { return std::pow(z, 1.0 - alpha); };

  DualDraw out;
  if (current.total_mass <= 0.0) return out;
  double s_prev = s1;
  double r_prev = c * s1 * 0.5 * (z_pow(a) + z_pow(current.total_mass));
  if (r_prev > t_target) {
    // target time lies inside the first segment; interpolate on [0, s1]
    const double s_star = s1 * t_target / r_prev;
    AtomSystem final_sys = sample_atoms(alpha, s_star, a, mu, rng);
    out.ok = final_sys.total_mass > 0.0;
    out.atom_count = final_sys.count();
    out.largest_norm_freq = out.ok ? largest_atom(final_sys) / final_sys.total_mass : 0.0;
    out.r_inverse = s_star;
    return out;
  }

  // previous grid state kept so the final partial transition never has to
  // cover less than a third of a step (its cost scales like the inverse
  // square of the step length)
  AtomSystem anchor = current;
  double s_anchor = s_prev;
  while (s_prev < s_horizon * 8.0) {
    const double step = config.uniform_step;
    const double s_next = s_prev + step;
    AtomSystem next = evolve_atoms(current, step, mu, rng);
    if (next.total_mass <= 0.0) return out;  // extinct before reaching the target clock
    const double r_next =
        r_prev + c * step * 0.5 * (z_pow(current.total_mass) + z_pow(next.total_mass));
    if (r_next > t_target) {
      const double frac = (t_target - r_prev) / (r_next - r_prev);
      const double s_star = s_prev + frac * step;
      AtomSystem final_sys;
      if (s_star - s_prev >= step / 3.0) {
        final_sys = evolve_atoms(current, s_star - s_prev, mu, rng);
      } else if (s_star > s_anchor) {
        final_sys = evolve_atoms(anchor, s_star - s_anchor, mu, rng);
      } else {
        final_sys = std::move(current);
      }
      if (final_sys.total_mass <= 0.0) return out;
      out.ok = true;
      out.atom_count = final_sys.count();
      out.largest_norm_freq = largest_atom(final_sys) / final_sys.total_mass;
      out.r_inverse = s_star;
      return out;
    }
    anchor = std::move(current);
    s_anchor = s_prev;
    current = std::move(next);
    s_prev = s_next;
    r_prev = r_next;
  }
  return out;  // clock never reached the target within the horizon
}

}  // namespace coalsim
