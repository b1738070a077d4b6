#pragma once

#include <cstdint>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "coalsim/measure.hpp"
#include "coalsim/rng.hpp"

namespace coalsim {

// lambda_{b,k} = int_0^1 x^{k-2} (1-x)^{b-k} Lambda(dx), the rate at which a
// fixed k-tuple of blocks merges when b blocks are present. Beta measures use
// the closed form B(k-alpha, b-k+alpha)/B(2-alpha, alpha) in log space;
// density measures use singularity-aware quadrature; Kingman is 1_{k==2}.
double lambda_bk(const MeasureSpec& measure, int b, int k);

// Limiting jump law of the block-counting chain (probability of losing k
// blocks in one merger as the block count tends to infinity):
//   zeta_k = alpha Gamma(k+1-alpha) / ((k+1)! Gamma(2-alpha)).
double limit_zeta(double alpha, int k);

// Per-measure memo of total merger rates lambda_b and, for density measures,
// of the merge weights C(b,j) lambda_{b,j} needed by jump sampling. Reads are
// concurrent; inserts are serialized. Values are pure functions of the
// measure, so racing recomputations are benign.
class RateCache {
 public:
  explicit RateCache(MeasureSpec measure);

  const MeasureSpec& measure() const { return measure_; }

  // lambda_b = sum_{k=2}^{b} C(b,k) lambda_{b,k}
  double total_rate(int b);

  // lambda_{b,2} (the weight seed; also the increment of the total-rate
  // ladder lambda_{b+1} = lambda_b + b lambda_{b+1,2}).
  double lambda2(int b);

  // C(b,j) lambda_{b,j}, the unnormalized probability that a merger among b
  // blocks involves exactly j of them.
  double merge_weight(int b, int j);

  // Bulk-fills lambda_2..lambda_b; call once before replicate-parallel runs.
  void ensure_totals_upto(int b);

  // Direct O(b) evaluation by the term-ratio recurrence (beta) or term-wise
  // quadrature (density); used to cross-check the ladder fill.
  double total_rate_direct(int b) const;

 private:
  double merge_weight_uncached(int b, int j) const;
  void fill_locked(int b);

  MeasureSpec measure_;
  std::shared_mutex mutex_;
  std::vector<double> totals_;  // totals_[b] = lambda_b, valid for b < filled_
  std::vector<double> lam2_;    // lam2_[b] = lambda_{b,2}
  int filled_ = 0;
  std::unordered_map<std::uint64_t, double> weights_;  // density merge weights
};

// Probability vector (zeta_{n,1}, ..., zeta_{n,n-1}) of the number of blocks
// lost at the next merger; entry k is C(n,k+1) lambda_{n,k+1} / lambda_n.
// Normalized by its own compensated sum so entries add to 1 exactly up to
// rounding.
std::vector<double> jump_distribution(RateCache& cache, int n);

// Samples the number of blocks lost at a merger among b blocks by sequential
// inversion of zeta_{b,.}, generating terms on the fly (expected
// O(1/(alpha-1)) terms per call for beta-like measures).
int sample_blocks_lost(RateCache& cache, int b, RngStream& rng);

}  // namespace coalsim
