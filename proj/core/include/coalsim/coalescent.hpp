#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coalsim/rates.hpp"

namespace coalsim {

struct BlockCountEvent {
  double time;
  int count_after;
  int blocks_lost;
};

// Event log of the block-counting chain N(t). Times are strictly increasing,
// counts strictly decreasing, count_after = previous count - blocks_lost.
struct BlockCountPath {
  int start_count = 0;
  std::vector<BlockCountEvent> events;

  int final_count() const { return events.empty() ? start_count : events.back().count_after; }
  double final_time() const { return events.empty() ? 0.0 : events.back().time; }
  int count_at(double t) const;
};

struct ChainStop {
  double horizon = std::numeric_limits<double>::infinity();
  int target_count = 1;  // stop once N <= target_count
};

// Exact event-driven simulation: the holding time at count b is
// Exp(lambda_b), the jump size is drawn from zeta_{b,.} by sequential
// inversion.
BlockCountPath simulate_block_chain(RateCache& cache, int n_start, ChainStop stop,
                                    RngStream& rng);

struct HitTime {
  double time;
  bool exact;  // true iff N(T_k) == k (the event V_k)
};

// T_k = inf{t : N(t) <= k}, or nullopt if the path never gets there.
std::optional<HitTime> first_hit_time(const BlockCountPath& path, int k);

// L_n = sum over visited counts k of k * (holding time at k). Requires a path
// run to a single block.
double tree_length(const BlockCountPath& path);

struct Block {
  int least_label;
  int size;
};

struct PartitionState {
  int n = 0;
  double time = 0.0;
  std::vector<Block> blocks;        // ordered by least label
  std::vector<int> label_to_block;  // label i (1-based) -> index into blocks

  int block_count() const { return static_cast<int>(blocks.size()); }
  double frequency(int block_index) const {
    return static_cast<double>(blocks[static_cast<std::size_t>(block_index)].size) / n;
  }
};

struct MergeEvent {
  double time;
  std::vector<int> least_labels;  // merged blocks; front() is the survivor
};

struct PartitionTrajectory {
  int n = 0;
  std::vector<MergeEvent> merges;
  PartitionState final_state;
  BlockCountPath counts;
};

// Full partition-valued simulation on {1,...,n}: block-count dynamics as in
// simulate_block_chain, and the participating blocks of each merger form a
// uniformly random subset of the required size.
class PartitionChain {
 public:
  PartitionChain(std::shared_ptr<RateCache> cache, int n, RngStream* rng,
                 bool record_merges = false);

  // One merger; returns false when a single block remains.
  bool step();
  void run_until(double t);
  void run_to_count(int k);

  double time() const { return time_; }
  int block_count() const { return static_cast<int>(least_.size()); }
  // the block containing label 1 always has least label 1
  int size_of_block_containing_1() const {
    return size_[static_cast<std::size_t>(index_of_least_[1])];
  }
  int max_block_size() const;

  PartitionState state() const;
  const std::vector<MergeEvent>& merges() const { return merges_; }
  const BlockCountPath& counts() const { return counts_; }
  PartitionTrajectory take_trajectory();

 private:
  std::shared_ptr<RateCache> cache_;
  RngStream* rng_;
  int n_;
  double time_ = 0.0;
  bool record_;
  std::vector<int> least_;           // least labels, arbitrary order
  std::vector<int> size_;            // block sizes, aligned with least_
  std::vector<int> index_of_least_;  // least label -> position in least_ (-1 if absorbed)
  mutable std::vector<int> parent_;  // union-find over labels (1-based), by least label
  std::vector<MergeEvent> merges_;
  BlockCountPath counts_;
  std::vector<int> scratch_;

  int find_root(int label) const;
  void apply_merge(int lost);
};

PartitionTrajectory simulate_partition(std::shared_ptr<RateCache> cache, int n,
                                       double horizon, RngStream& rng);

struct BlockStats {
  int n_blocks;
  int n_at_most_x;  // blocks with frequency (size/n) <= x
  double k_freq;    // frequency of the block containing label 1
  double w_freq;    // largest frequency
};

BlockStats block_stats(const PartitionState& state, double x);

// Pairwise coalescence times d(i,j) = inf{t : i and j share a block},
// reconstructed by replaying the merge log. Entries are NaN when the pair has
// not coalesced by the end of the trajectory.
struct PairwiseTimes {
  std::vector<int> labels;
  std::vector<double> d;  // row-major, labels.size() x labels.size()
  bool complete;

  double at(std::size_t i, std::size_t j) const { return d[i * labels.size() + j]; }
};

PairwiseTimes pairwise_coalescence_times(const PartitionTrajectory& trajectory,
                                         std::span<const int> labels);

}  // namespace coalsim
