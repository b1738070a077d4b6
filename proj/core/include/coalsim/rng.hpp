#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace coalsim {

// All stochastic code in this library draws through RngStream so that a run is
// fully determined by (seed, stream). Streams are derived with SplitMix64
// mixing, one stream per replicate; replicate ensembles can then run in any
// order (or in parallel) without changing results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    const std::uint64_t a = mix64(seed + 0x9e3779b97f4a7c15ull);
    const std::uint64_t b = mix64(a ^ mix64(stream + 0xbf58476d1ce4e5b9ull));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
  }

  std::mt19937_64& engine() { return engine_; }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform in (0,1); safe as argument of log
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Exact Poisson sampler: Knuth multiplication for small means, Hormann's
  // PTRS transformed rejection otherwise. Only consumes uniform() draws, so
  // sequences are reproducible independent of the standard library.
  std::int64_t poisson(double mean);

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

inline std::int64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > limit);
    return k - 1;
  }
  // PTRS (Hormann 1993), exact for all means representable in double.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform_pos();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * log_mean - mean - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

}  // namespace coalsim
