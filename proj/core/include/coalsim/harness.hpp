#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coalsim/measure.hpp"

namespace coalsim {

// Verification targets, one per limit theorem in scope:
//   T1_1  block-count scaling  t^{1/(a-1)} N(t) -> (a/(A Gamma(2-a)))^{1/(a-1)}
//   T1_2  conditional ranked frequencies at N(T_k)=k vs the weighted-mu law
//   T1_4  rescaled block-size CDF vs F(gamma x)
//   P1_5  size-biased block (block containing 1) Laplace transform
//   P1_6  largest block vs the Frechet(alpha) law
//   T1_8  visit probability P(N(t) = n for some t) -> alpha - 1
//   T1_9  total tree length  L_n / n^{2-alpha}
//   DUAL  coalescent at t vs CSBP atoms at R^{-1}(t)
//   KING  Kingman sanity: t N(t) -> 2 and E[L_n] = 2 H_{n-1}
enum class Target { T1_1, T1_2, T1_4, P1_5, P1_6, T1_8, T1_9, DUAL, KING };

std::optional<Target> parse_target(const std::string& name);
std::string target_name(Target target);

struct VerificationConfig {
  Target target = Target::T1_1;
  double alpha = 1.5;
  MeasureSpec measure = MeasureSpec::Beta(1.5);
  std::uint64_t seed = 1;
  int threads = 0;  // <= 0: hardware concurrency

  int n_start = 0;
  int replicates = 0;
  double time_point = 0.0;            // observation time (T1_4/P1_5/P1_6/DUAL)
  int window_lo = 0, window_hi = 0;   // block-count window (T1_1/KING)
  std::vector<int> k_values;          // T1_2 block targets / T1_8 visit counts
  int min_accepted = 0;               // T1_2 conditional replicates per k

  // pass bands, pinned from the acceptance criteria
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double ks_tol = 0.0;
  double laplace_tol = 0.0;
  double se_multiplier = 3.0;

  std::string echo() const;
};

// Desk-scale defaults matching the acceptance criteria.
VerificationConfig make_default_config(Target target, double alpha, std::uint64_t seed);

struct Metric {
  std::string name;
  double estimate = 0.0;
  double reference = 0.0;
  std::string provenance;  // derivation of the reference value
  double band = 0.0;       // allowed |estimate - reference|
  double ci_lo = 0.0, ci_hi = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string target;
  std::vector<Metric> metrics;
  bool pass = false;
  double runtime_seconds = 0.0;
  long long replicates = 0;
  std::uint64_t seed = 0;
  std::string config_echo;
};

// Runs the Monte Carlo protocol for the configured target. Deterministic
// under a fixed (seed, config); replicate aggregation is order-independent.
VerificationReport run_verification(const VerificationConfig& config);

std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

}  // namespace coalsim
