#include "coalsim/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "coalsim/coalescent.hpp"
#include "coalsim/csbp.hpp"
#include "coalsim/io.hpp"
#include "coalsim/numeric.hpp"
#include "coalsim/mu_dist.hpp"
#include "coalsim/parallel.hpp"
#include "coalsim/rates.hpp"
#include "coalsim/stats.hpp"
#include "json.hpp"

namespace coalsim {

namespace {

// stream-id blocks so sub-ensembles of one run never collide
constexpr std::uint64_t kStreamBlock = 1ull << 32;
constexpr std::uint64_t kBootstrapStream = 0xB0075ull << 40;
constexpr std::uint64_t kWeightedMuStream = 0x3E7Aull << 40;

double scaling_constant(const MeasureSpec& measure) {
  const double a = measure.alpha();
  const double A = measure.singular_coeff();
  return std::pow(a / (A * std::tgamma(2.0 - a)), 1.0 / (a - 1.0));
}

double tree_length_constant(const MeasureSpec& measure) {
  const double a = measure.alpha();
  const double A = measure.singular_coeff();
  return a * (a - 1.0) / (A * std::tgamma(2.0 - a) * (2.0 - a));
}

double frechet_scale(double a) {
  return std::pow(a * std::tgamma(a) * std::tgamma(2.0 - a), 1.0 / a);
}

Metric make_metric(std::string name, double estimate, double reference,
                   std::string provenance, double band, double ci_lo = 0.0,
                   double ci_hi = 0.0) {
  Metric m;
  m.name = std::move(name);
  m.estimate = estimate;
  m.reference = reference;
  m.provenance = std::move(provenance);
  m.band = band;
  m.ci_lo = ci_lo;
  m.ci_hi = ci_hi;
  m.pass = std::fabs(estimate - reference) <= band * (1.0 + 1e-12);
  return m;
}

void require_beta(const VerificationConfig& config, const char* what) {
  if (config.measure.kind() != MeasureKind::beta) {
    throw std::invalid_argument(std::string(what) +
                                " is a beta-coalescent statement; use a beta measure");
  }
}

// the block-count window where size/n stands in for asymptotic frequencies
void check_frequency_window(const VerificationConfig& config) {
  const double gamma = scaling_constant(config.measure);
  const double expected =
      gamma * std::pow(config.time_point, -1.0 / (config.alpha - 1.0));
  const double lo = std::pow(config.n_start, 0.2);
  const double hi = std::pow(config.n_start, 0.7);
  if (expected < lo || expected > hi) {
    throw std::invalid_argument(
        "time_point places the expected block count (" + std::to_string(expected) +
        ") outside the frequency window [n^0.2, n^0.7] = [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");
  }
}

struct Ensemble {
  std::shared_ptr<RateCache> cache;
  const VerificationConfig* config;
};

VerificationReport finish(const VerificationConfig& config, std::vector<Metric> metrics,
                          long long replicates,
                          std::chrono::steady_clock::time_point started) {
  VerificationReport report;
  report.target = target_name(config.target);
  report.metrics = std::move(metrics);
  report.pass = std::all_of(report.metrics.begin(), report.metrics.end(),
                            [](const Metric& m) { return m.pass; });
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report.replicates = replicates;
  report.seed = config.seed;
  report.config_echo = config.echo();
  return report;
}

// ---------------------------------------------------------------------------
// T1.1: median of t^{1/(alpha-1)} N(t) over a block-count window
// ---------------------------------------------------------------------------
VerificationReport run_t11(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.measure.is_kingman()) {
    throw std::invalid_argument("T1.1 requires a measure with alpha in (1,2)");
  }
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const double expo = 1.0 / (config.alpha - 1.0);

  std::vector<double> replicate_medians(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    ChainStop stop;
    stop.target_count = config.window_lo;
    const BlockCountPath path = simulate_block_chain(*cache, config.n_start, stop, rng);
    std::vector<double> values;
    for (const auto& e : path.events) {
      if (e.count_after >= config.window_lo && e.count_after <= config.window_hi) {
        values.push_back(std::pow(e.time, expo) * e.count_after);
      }
    }
    replicate_medians[static_cast<std::size_t>(rep)] =
        values.empty() ? std::numeric_limits<double>::quiet_NaN() : median(values);
  });
  std::erase_if(replicate_medians, [](double v) { return std::isnan(v); });

  RngStream boot_rng(config.seed, kBootstrapStream);
  const MedianCI ci = bootstrap_median(replicate_medians, 1000, boot_rng);
  const double reference = scaling_constant(config.measure);
  std::vector<Metric> metrics;
  metrics.push_back(make_metric(
      "block_count_scaling", ci.median, reference,
      "(alpha/(A Gamma(2-alpha)))^{1/(alpha-1)} with A the x^{1-alpha} coefficient",
      config.rel_tol * reference, ci.lo, ci.hi));
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// T1.2: conditional ranked frequencies at N(T_k) = k vs the weighted-mu law
// ---------------------------------------------------------------------------
VerificationReport run_t12(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  require_beta(config, "T1.2");
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const MuTable mu = build_mu_table(config.alpha);

  std::vector<int> ks = config.k_values;
  std::sort(ks.begin(), ks.end());
  const int k_min = ks.front();

  // conditional-coalescent side: every replicate yields one sample per k it
  // hits exactly
  std::vector<std::vector<double>> accepted_slots(
      static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    PartitionChain chain(cache, config.n_start, &rng);
    auto& slot = accepted_slots[static_cast<std::size_t>(rep)];
    slot.assign(ks.size(), std::numeric_limits<double>::quiet_NaN());
    int prev = chain.block_count();
    while (prev > k_min && chain.step()) {
      const int now = chain.block_count();
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (prev > ks[i] && now == ks[i]) {
          slot[i] = static_cast<double>(chain.max_block_size()) / config.n_start;
        }
      }
      prev = now;
    }
  });

  std::vector<Metric> metrics;
  long long total_accepted = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::vector<double> sample;
    for (const auto& slot : accepted_slots) {
      if (!std::isnan(slot[i])) sample.push_back(slot[i]);
    }
    total_accepted += static_cast<long long>(sample.size());
    if (static_cast<int>(sample.size()) < config.min_accepted) {
      throw numerical_error("T1.2: only " + std::to_string(sample.size()) +
                            " accepted replicates for k=" + std::to_string(ks[i]) +
                            "; raise replicates");
    }
    // frequencies in the conditional sample sum to 1 exactly, so the largest
    // coordinate is directly comparable with the weighted-mu estimator
    const MeanSE conditional = mean_se(sample);

    // weighted-mu side: E[S^{1-alpha} g(X/S)] / E[S^{1-alpha}]
    RngStream wrng(config.seed, kWeightedMuStream + static_cast<std::uint64_t>(ks[i]));
    const int draws = 1000000;
    double s_w = 0.0, s_wg = 0.0, s_w2 = 0.0, s_wg2 = 0.0, s_w2g = 0.0;
    for (int d = 0; d < draws; ++d) {
      double sum = 0.0, largest = 0.0;
      for (int j = 0; j < ks[i]; ++j) {
        const double x = mu.sample(wrng);
        sum += x;
        largest = std::max(largest, x);
      }
      const double w = std::pow(sum, 1.0 - config.alpha);
      const double g = largest / sum;
      s_w += w;
      s_wg += w * g;
      s_w2 += w * w;
      s_wg2 += w * g * w * g;
      s_w2g += w * w * g;
    }
    const double est = s_wg / s_w;
    const double n_d = static_cast<double>(draws);
    const double resid2 = (s_wg2 - 2.0 * est * s_w2g + est * est * s_w2) / n_d;
    const double weighted_se = std::sqrt(std::max(resid2, 0.0) / n_d) / (s_w / n_d);

    const double band = config.se_multiplier *
                        std::sqrt(conditional.se * conditional.se + weighted_se * weighted_se);
    metrics.push_back(make_metric(
        "largest_coord_k" + std::to_string(ks[i]), conditional.mean, est,
        "weighted-mu estimator E[S^{1-a} g(X/S)]/E[S^{1-a}], " +
            std::to_string(sample.size()) + " accepted replicates",
        band, conditional.mean - 1.96 * conditional.se,
        conditional.mean + 1.96 * conditional.se));
  }
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// T1.4: KS between pooled rescaled block sizes and F(gamma x)
// ---------------------------------------------------------------------------
VerificationReport run_t14(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  require_beta(config, "T1.4");
  check_frequency_window(config);
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const MuTable mu = build_mu_table(config.alpha);
  const double gamma = scaling_constant(config.measure);
  const double rescale = std::pow(config.time_point, -1.0 / (config.alpha - 1.0));

  std::vector<std::vector<double>> pools(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    PartitionChain chain(cache, config.n_start, &rng);
    chain.run_until(config.time_point);
    const PartitionState state = chain.state();
    auto& pool = pools[static_cast<std::size_t>(rep)];
    pool.reserve(state.blocks.size());
    for (const auto& b : state.blocks) {
      pool.push_back(static_cast<double>(b.size) / config.n_start * rescale);
    }
  });
  std::vector<double> pooled;
  for (const auto& p : pools) pooled.insert(pooled.end(), p.begin(), p.end());

  const double ks = ks_statistic(pooled, [&](double x) { return mu.cdf_at(gamma * x); });
  std::vector<Metric> metrics;
  metrics.push_back(make_metric("ks_block_sizes", ks, 0.0,
                                "one-sample KS against F(gamma x), " +
                                    std::to_string(pooled.size()) + " pooled blocks",
                                config.ks_tol));
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// P1.5: Laplace transform of the rescaled block containing 1
// ---------------------------------------------------------------------------
VerificationReport run_p15(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  require_beta(config, "P1.5");
  check_frequency_window(config);
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const double gamma = scaling_constant(config.measure);
  const double rescale =
      gamma * std::pow(config.time_point, -1.0 / (config.alpha - 1.0));

  std::vector<double> values(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    PartitionChain chain(cache, config.n_start, &rng);
    chain.run_until(config.time_point);
    values[static_cast<std::size_t>(rep)] =
        rescale * chain.size_of_block_containing_1() / config.n_start;
  });

  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  const auto points = empirical_laplace(values, lambdas);
  std::vector<Metric> metrics;
  for (const auto& p : points) {
    const double reference = laplace_size_biased(config.alpha, p.lambda);
    std::ostringstream name;
    name << "laplace_K_lambda_" << p.lambda;
    metrics.push_back(make_metric(name.str(), p.mean, reference,
                                  "(1+lambda^{alpha-1})^{-alpha/(alpha-1)}",
                                  config.laplace_tol, p.mean - 1.96 * p.std_error,
                                  p.mean + 1.96 * p.std_error));
  }
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// P1.6: largest block vs Frechet(alpha)
// ---------------------------------------------------------------------------
VerificationReport run_p16(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  require_beta(config, "P1.6");
  check_frequency_window(config);
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const double scale = frechet_scale(config.alpha);
  const double rescale = scale * std::pow(config.time_point, -1.0 / config.alpha);

  std::vector<double> values(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    PartitionChain chain(cache, config.n_start, &rng);
    chain.run_until(config.time_point);
    values[static_cast<std::size_t>(rep)] =
        rescale * chain.max_block_size() / config.n_start;
  });

  const double a = config.alpha;
  const double ks =
      ks_statistic(values, [a](double x) { return std::exp(-std::pow(x, -a)); });
  std::vector<Metric> metrics;
  metrics.push_back(make_metric("ks_largest_block", ks, 0.0,
                                "one-sample KS against the Frechet CDF exp(-x^-alpha)",
                                config.ks_tol));
  if (std::fabs(config.alpha - 1.5) < 1e-12) {
    metrics.push_back(make_metric("frechet_scale", scale, 1.7703,
                                  "(alpha Gamma(alpha) Gamma(2-alpha))^{1/alpha}",
                                  0.002 * 1.7703));
  }
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// T1.8: visit probabilities P(V_n)
// ---------------------------------------------------------------------------
VerificationReport run_t18(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.measure.is_kingman()) {
    throw std::invalid_argument("T1.8 requires a measure with alpha in (1,2)");
  }
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);

  struct VisitEstimate {
    double p, se;
  };
  std::vector<VisitEstimate> estimates;
  for (std::size_t j = 0; j < config.k_values.size(); ++j) {
    const int n_target = config.k_values[j];
    std::vector<double> hits(static_cast<std::size_t>(config.replicates));
    parallel_replicates(config.replicates, config.threads, [&](int rep) {
      RngStream rng(config.seed,
                    (static_cast<std::uint64_t>(j) + 1) * kStreamBlock +
                        static_cast<std::uint64_t>(rep));
      ChainStop stop;
      stop.target_count = n_target;
      const BlockCountPath path = simulate_block_chain(*cache, config.n_start, stop, rng);
      hits[static_cast<std::size_t>(rep)] = path.final_count() == n_target ? 1.0 : 0.0;
    });
    const MeanSE e = mean_se(hits);
    estimates.push_back({e.mean, e.se});
  }

  std::vector<Metric> metrics;
  const double reference = config.alpha - 1.0;
  metrics.push_back(make_metric(
      "visit_prob_n" + std::to_string(config.k_values.front()), estimates.front().p,
      reference, "Theorem limit alpha - 1", config.abs_tol,
      estimates.front().p - 1.96 * estimates.front().se,
      estimates.front().p + 1.96 * estimates.front().se));
  for (std::size_t j = 1; j < estimates.size(); ++j) {
    const double diff = std::fabs(estimates[j].p - estimates.front().p);
    const double band = 2.0 * std::sqrt(estimates[j].se * estimates[j].se +
                                        estimates.front().se * estimates.front().se);
    metrics.push_back(make_metric(
        "visit_prob_consistency_n" + std::to_string(config.k_values[j]), diff, 0.0,
        "|P(V_" + std::to_string(config.k_values[j]) + ") - P(V_" +
            std::to_string(config.k_values.front()) + ")|, limit is n-independent",
        band));
  }
  return finish(config, std::move(metrics),
                static_cast<long long>(config.replicates) *
                    static_cast<long long>(config.k_values.size()),
                started);
}

// ---------------------------------------------------------------------------
// T1.9: total tree length
// ---------------------------------------------------------------------------
VerificationReport run_t19(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.measure.is_kingman()) {
    throw std::invalid_argument("T1.9 requires a measure with alpha in (1,2)");
  }
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const double norm = std::pow(config.n_start, 2.0 - config.alpha);

  std::vector<double> values(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    const BlockCountPath path =
        simulate_block_chain(*cache, config.n_start, ChainStop{}, rng);
    values[static_cast<std::size_t>(rep)] = tree_length(path) / norm;
  });

  RngStream boot_rng(config.seed, kBootstrapStream);
  const MedianCI ci = bootstrap_median(values, 1000, boot_rng);
  const double reference = tree_length_constant(config.measure);
  std::vector<Metric> metrics;
  metrics.push_back(make_metric("tree_length_scaling", ci.median, reference,
                                "alpha(alpha-1)/(A Gamma(2-alpha)(2-alpha))",
                                config.rel_tol * reference, ci.lo, ci.hi));
  return finish(config, std::move(metrics), config.replicates, started);
}

// ---------------------------------------------------------------------------
// DUAL: coalescent at t vs CSBP atoms at R^{-1}(t)
// ---------------------------------------------------------------------------
VerificationReport run_dual(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  require_beta(config, "DUAL");
  auto cache = std::make_shared<RateCache>(config.measure);
  cache->ensure_totals_upto(config.n_start);
  const MuTable mu = build_mu_table(config.alpha);

  std::vector<double> coal_counts(static_cast<std::size_t>(config.replicates));
  std::vector<double> coal_largest(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    PartitionChain chain(cache, config.n_start, &rng);
    chain.run_until(config.time_point);
    coal_counts[static_cast<std::size_t>(rep)] = chain.block_count();
    coal_largest[static_cast<std::size_t>(rep)] =
        static_cast<double>(chain.max_block_size()) / config.n_start;
  });

  std::vector<double> csbp_counts;
  std::vector<double> csbp_largest;
  std::vector<DualDraw> draws(static_cast<std::size_t>(config.replicates));
  CsbpDualConfig dual_cfg;
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, kStreamBlock + static_cast<std::uint64_t>(rep));
    draws[static_cast<std::size_t>(rep)] =
        run_csbp_dual(config.alpha, 1.0, config.time_point, mu, dual_cfg, rng);
  });
  int failed = 0;
  for (const auto& d : draws) {
    if (!d.ok) {
      ++failed;
      continue;
    }
    csbp_counts.push_back(static_cast<double>(d.atom_count));
    csbp_largest.push_back(d.largest_norm_freq);
  }
  if (failed > config.replicates / 100) {
    throw numerical_error("DUAL: " + std::to_string(failed) +
                          " CSBP replicates failed to reach the target clock");
  }

  std::vector<Metric> metrics;
  metrics.push_back(make_metric(
      "ks_block_count", ks_statistic(coal_counts, csbp_counts), 0.0,
      "two-sample KS: N(t) vs D(R^{-1}(t))", config.ks_tol));
  metrics.push_back(make_metric(
      "ks_largest_frequency", ks_statistic(coal_largest, csbp_largest), 0.0,
      "two-sample KS: largest frequency vs largest normalized atom", config.ks_tol));
  return finish(config, std::move(metrics), 2LL * config.replicates, started);
}

// ---------------------------------------------------------------------------
// KING: Kingman sanity, t N(t) -> 2 and E[L_n] = 2 H_{n-1}
// ---------------------------------------------------------------------------
VerificationReport run_king(const VerificationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  auto cache = std::make_shared<RateCache>(MeasureSpec::Kingman());
  cache->ensure_totals_upto(config.n_start);

  const int tn_replicates = std::max(200, config.replicates / 2);
  std::vector<double> tn_medians(static_cast<std::size_t>(tn_replicates));
  parallel_replicates(tn_replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(rep));
    ChainStop stop;
    stop.target_count = config.window_lo;
    const BlockCountPath path = simulate_block_chain(*cache, config.n_start, stop, rng);
    std::vector<double> values;
    for (const auto& e : path.events) {
      if (e.count_after >= config.window_lo && e.count_after <= config.window_hi) {
        values.push_back(e.time * e.count_after);
      }
    }
    tn_medians[static_cast<std::size_t>(rep)] = median(values);
  });

  std::vector<double> lengths(static_cast<std::size_t>(config.replicates));
  parallel_replicates(config.replicates, config.threads, [&](int rep) {
    RngStream rng(config.seed, kStreamBlock + static_cast<std::uint64_t>(rep));
    const BlockCountPath path =
        simulate_block_chain(*cache, config.n_start, ChainStop{}, rng);
    lengths[static_cast<std::size_t>(rep)] = tree_length(path);
  });
  double harmonic = 0.0;
  for (int k = 1; k < config.n_start; ++k) harmonic += 1.0 / k;
  std::vector<double> ratios(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) ratios[i] = lengths[i] / (2.0 * harmonic);
  const MeanSE ratio = mean_se(ratios);

  RngStream boot_rng(config.seed, kBootstrapStream);
  const MedianCI tn_ci = bootstrap_median(tn_medians, 1000, boot_rng);
  std::vector<Metric> metrics;
  metrics.push_back(make_metric("t_n_limit", tn_ci.median, 2.0, "t N(t) -> 2",
                                config.rel_tol * 2.0, tn_ci.lo, tn_ci.hi));
  metrics.push_back(make_metric("tree_length_over_2H", ratio.mean, 1.0,
                                "E[L_n] = 2 H_{n-1} exactly for Kingman",
                                config.abs_tol, ratio.mean - 1.96 * ratio.se,
                                ratio.mean + 1.96 * ratio.se));
  return finish(config, std::move(metrics),
                static_cast<long long>(tn_replicates) + config.replicates, started);
}

}  // namespace

std::optional<Target> parse_target(const std::string& name) {
  std::string key = name;
  for (auto& c : key) {
    if (c == '_') c = '.';
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (key == "T1.1") return Target::T1_1;
  if (key == "T1.2") return Target::T1_2;
  if (key == "T1.4") return Target::T1_4;
  if (key == "P1.5") return Target::P1_5;
  if (key == "P1.6") return Target::P1_6;
  if (key == "T1.8") return Target::T1_8;
  if (key == "T1.9") return Target::T1_9;
  if (key == "DUAL") return Target::DUAL;
  if (key == "KING") return Target::KING;
  return std::nullopt;
}

std::string target_name(Target target) {
  switch (target) {
    case Target::T1_1: return "T1.1";
    case Target::T1_2: return "T1.2";
    case Target::T1_4: return "T1.4";
    case Target::P1_5: return "P1.5";
    case Target::P1_6: return "P1.6";
    case Target::T1_8: return "T1.8";
    case Target::T1_9: return "T1.9";
    case Target::DUAL: return "DUAL";
    case Target::KING: return "KING";
  }
  return "?";
}

std::string VerificationConfig::echo() const {
  std::ostringstream os;
  os << "target=" << target_name(target) << " alpha=" << alpha
     << " measure=" << measure.describe() << " seed=" << seed << " n_start=" << n_start
     << " replicates=" << replicates << " time_point=" << time_point << " window=["
     << window_lo << "," << window_hi << "]";
  if (!k_values.empty()) {
    os << " k_values=";
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      os << (i ? "," : "") << k_values[i];
    }
  }
  return os.str();
}

VerificationConfig make_default_config(Target target, double alpha, std::uint64_t seed) {
  VerificationConfig c;
  c.target = target;
  c.alpha = alpha;
  c.seed = seed;
  if (target != Target::KING) c.measure = MeasureSpec::Beta(alpha);
  const double gamma_beta =
      target == Target::KING ? 0.0 : scaling_constant(c.measure);
  switch (target) {
    case Target::T1_1:
      c.n_start = 100000;
      c.replicates = 200;
      c.window_lo = 100;
      c.window_hi = 3000;
      c.rel_tol = 0.05;
      break;
    case Target::T1_2:
      c.n_start = 10000;
      c.k_values = {3, 4, 5};
      c.min_accepted = 2000;
      c.replicates = static_cast<int>(std::ceil(c.min_accepted / (alpha - 1.0) * 1.4));
      c.se_multiplier = 3.0;
      break;
    case Target::T1_4:
      c.n_start = 100000;
      c.time_point = std::pow(gamma_beta / 500.0, alpha - 1.0);
      c.replicates = 12;
      c.ks_tol = 0.03;
      break;
    case Target::P1_5:
      c.n_start = 100000;
      c.time_point = std::pow(gamma_beta / 500.0, alpha - 1.0);
      c.replicates = 4000;
      c.laplace_tol = 0.02;
      break;
    case Target::P1_6:
      c.n_start = 100000;
      c.time_point = std::pow(gamma_beta / 500.0, alpha - 1.0);
      c.replicates = 5000;
      c.ks_tol = 0.03;
      break;
    case Target::T1_8:
      c.n_start = 5000;
      c.k_values = {100, 50, 200};
      c.replicates = 20000;
      c.abs_tol = 0.02;
      break;
    case Target::T1_9:
      c.n_start = 10000;
      c.replicates = 500;
      c.rel_tol = 0.05;
      break;
    case Target::DUAL:
      c.n_start = 100000;
      c.time_point = 0.05;
      c.replicates = 2500;
      c.ks_tol = 0.05;
      break;
    case Target::KING:
      c.measure = MeasureSpec::Kingman();
      c.n_start = 10000;
      c.replicates = 1000;
      c.window_lo = 20;
      c.window_hi = 100;
      c.rel_tol = 0.05;
      c.abs_tol = 0.02;
      break;
  }
  return c;
}

VerificationReport run_verification(const VerificationConfig& config) {
  if (config.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  switch (config.target) {
    case Target::T1_1: return run_t11(config);
    case Target::T1_2: return run_t12(config);
    case Target::T1_4: return run_t14(config);
    case Target::P1_5: return run_p15(config);
    case Target::P1_6: return run_p16(config);
    case Target::T1_8: return run_t18(config);
    case Target::T1_9: return run_t19(config);
    case Target::DUAL: return run_dual(config);
    case Target::KING: return run_king(config);
  }
  throw std::invalid_argument("unknown verification target");
}

std::string report_to_json(const VerificationReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["target"] = report.target;
  j["pass"] = report.pass;
  j["runtime_seconds"] = report.runtime_seconds;
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  j["config"] = report.config_echo;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : report.metrics) {
    j["metrics"].push_back({{"name", m.name},
                            {"estimate", m.estimate},
                            {"reference", m.reference},
                            {"provenance", m.provenance},
                            {"band", m.band},
                            {"ci", {m.ci_lo, m.ci_hi}},
                            {"pass", m.pass}});
  }
  return j.dump(2);
}

std::string report_to_csv(const VerificationReport& report) {
  std::ostringstream os;
  os << "# coalsim_version=" << kVersion << '\n';
  os << "# config=" << report.config_echo << '\n';
  os << "# seed=" << report.seed << '\n';
  os << "target,metric,estimate,reference,band,ci_lo,ci_hi,pass\n";
  for (const auto& m : report.metrics) {
    os << report.target << ',' << m.name << ',' << format_g17(m.estimate) << ','
       << format_g17(m.reference) << ',' << format_g17(m.band) << ','
       << format_g17(m.ci_lo) << ',' << format_g17(m.ci_hi) << ','
       << (m.pass ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace coalsim
