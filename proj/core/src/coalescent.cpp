#include "coalsim/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coalsim {

int BlockCountPath::count_at(double t) const {
  int count = start_count;
  for (const auto& e : events) {
    if (e.time > t) break;
    count = e.count_after;
  }
  return count;
}

BlockCountPath simulate_block_chain(RateCache& cache, int n_start, ChainStop stop,
                                    RngStream& rng) {
  if (n_start < 2) throw std::invalid_argument("simulate_block_chain requires n_start >= 2");
  BlockCountPath path;
  path.start_count = n_start;
  int b = n_start;
  double t = 0.0;
  while (b > 1 && b > stop.target_count) {
    const double rate = cache.total_rate(b);
    const double t_next = t + rng.exponential(rate);
    if (t_next > stop.horizon) break;
    const int lost = sample_blocks_lost(cache, b, rng);
    b -= lost;
    t = t_next;
    path.events.push_back({t, b, lost});
  }
  return path;
}

std::optional<HitTime> first_hit_time(const BlockCountPath& path, int k) {
  if (k >= path.start_count) return HitTime{0.0, k == path.start_count};
  for (const auto& e : path.events) {
    if (e.count_after <= k) return HitTime{e.time, e.count_after == k};
  }
  return std::nullopt;
}

double tree_length(const BlockCountPath& path) {
  if (path.final_count() != 1) {
    throw std::invalid_argument("tree_length requires a path run to a single block");
  }
  double length = 0.0;
  double t_prev = 0.0;
  double b_prev = path.start_count;
  for (const auto& e : path.events) {
    length += b_prev * (e.time - t_prev);
    t_prev = e.time;
    b_prev = e.count_after;
  }
  return length;
}

PartitionChain::PartitionChain(std::shared_ptr<RateCache> cache, int n, RngStream* rng,
                               bool record_merges)
    : cache_(std::move(cache)), rng_(rng), n_(n), record_(record_merges) {
  if (n < 2) throw std::invalid_argument("partition simulation requires n >= 2");
  least_.resize(static_cast<std::size_t>(n));
  size_.assign(static_cast<std::size_t>(n), 1);
  index_of_least_.resize(static_cast<std::size_t>(n) + 1);
  parent_.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) {
    least_[static_cast<std::size_t>(i)] = i + 1;
    index_of_least_[static_cast<std::size_t>(i) + 1] = i;
  }
  for (int i = 0; i <= n; ++i) parent_[static_cast<std::size_t>(i)] = i;
  counts_.start_count = n;
}

int PartitionChain::find_root(int label) const {
  int r = label;
  while (parent_[static_cast<std::size_t>(r)] != r) r = parent_[static_cast<std::size_t>(r)];
  while (parent_[static_cast<std::size_t>(label)] != r) {
    const int next = parent_[static_cast<std::size_t>(label)];
    parent_[static_cast<std::size_t>(label)] = r;
    label = next;
  }
  return r;
}

bool PartitionChain::step() {
  const int b = block_count();
  if (b <= 1) return false;
  const double rate = cache_->total_rate(b);
  time_ += rng_->exponential(rate);
  apply_merge(sample_blocks_lost(*cache_, b, *rng_));
  return true;
}

void PartitionChain::apply_merge(int lost) {
  const int b = block_count();
  const int participants = lost + 1;

  // uniformly random subset of `participants` block indices (Floyd)
  scratch_.clear();
  for (int i = b - participants; i < b; ++i) {
    const int r = static_cast<int>(rng_->uniform() * (i + 1));
    if (std::find(scratch_.begin(), scratch_.end(), r) != scratch_.end()) {
      scratch_.push_back(i);
    } else {
      scratch_.push_back(r);
    }
  }
  // descending order so swap-removals at the back never disturb pending indices
  std::sort(scratch_.begin(), scratch_.end(), std::greater<int>());

  int keep_least = least_[static_cast<std::size_t>(scratch_.front())];
  int merged_size = 0;
  for (int idx : scratch_) {
    merged_size += size_[static_cast<std::size_t>(idx)];
    keep_least = std::min(keep_least, least_[static_cast<std::size_t>(idx)]);
  }
  MergeEvent ev;
  if (record_) {
    ev.time = time_;
    ev.least_labels.reserve(scratch_.size());
    ev.least_labels.push_back(keep_least);
    for (int idx : scratch_) {
      const int l = least_[static_cast<std::size_t>(idx)];
      if (l != keep_least) ev.least_labels.push_back(l);
    }
  }
  for (int idx : scratch_) {
    const int l = least_[static_cast<std::size_t>(idx)];
    if (l != keep_least) {
      parent_[static_cast<std::size_t>(l)] = keep_least;
      index_of_least_[static_cast<std::size_t>(l)] = -1;
      const std::size_t last = least_.size() - 1;
      const std::size_t uidx = static_cast<std::size_t>(idx);
      if (uidx != last) {
        least_[uidx] = least_[last];
        size_[uidx] = size_[last];
        index_of_least_[static_cast<std::size_t>(least_[uidx])] = idx;
      }
      least_.pop_back();
      size_.pop_back();
    }
  }
  size_[static_cast<std::size_t>(index_of_least_[static_cast<std::size_t>(keep_least)])] =
      merged_size;

  counts_.events.push_back({time_, static_cast<int>(least_.size()), lost});
  if (record_) merges_.push_back(std::move(ev));
}

void PartitionChain::run_until(double t) {
  if (t < time_) throw std::invalid_argument("run_until cannot move backwards in time");
  while (block_count() > 1) {
    const double rate = cache_->total_rate(block_count());
    const double dt = rng_->exponential(rate);
    if (time_ + dt > t) break;
    time_ += dt;
    apply_merge(sample_blocks_lost(*cache_, block_count(), *rng_));
  }
  time_ = t;
}

void PartitionChain::run_to_count(int k) {
  while (block_count() > std::max(k, 1) && step()) {
  }
}

int PartitionChain::max_block_size() const {
  return *std::max_element(size_.begin(), size_.end());
}

PartitionState PartitionChain::state() const {
  PartitionState s;
  s.n = n_;
  s.time = time_;
  s.blocks.reserve(least_.size());
  for (std::size_t i = 0; i < least_.size(); ++i) s.blocks.push_back({least_[i], size_[i]});
  std::sort(s.blocks.begin(), s.blocks.end(),
            [](const Block& a, const Block& b) { return a.least_label < b.least_label; });
  s.label_to_block.assign(static_cast<std::size_t>(n_), -1);
  std::vector<int> sorted_index(static_cast<std::size_t>(n_) + 1, -1);
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    sorted_index[static_cast<std::size_t>(s.blocks[i].least_label)] = static_cast<int>(i);
  }
  for (int label = 1; label <= n_; ++label) {
    s.label_to_block[static_cast<std::size_t>(label) - 1] =
        sorted_index[static_cast<std::size_t>(find_root(label))];
  }
  return s;
}

PartitionTrajectory PartitionChain::take_trajectory() {
  PartitionTrajectory tr;
  tr.n = n_;
  tr.final_state = state();
  tr.merges = std::move(merges_);
  tr.counts = std::move(counts_);
  return tr;
}

PartitionTrajectory simulate_partition(std::shared_ptr<RateCache> cache, int n,
                                       double horizon, RngStream& rng) {
  PartitionChain chain(std::move(cache), n, &rng, /*record_merges=*/true);
  chain.run_until(horizon);
  return chain.take_trajectory();
}

BlockStats block_stats(const PartitionState& state, double x) {
  BlockStats st{state.block_count(), 0, 0.0, 0.0};
  int max_size = 0;
  for (const auto& b : state.blocks) {
    if (static_cast<double>(b.size) / state.n <= x) ++st.n_at_most_x;
    max_size = std::max(max_size, b.size);
  }
  st.k_freq = static_cast<double>(state.blocks[static_cast<std::size_t>(
                  state.label_to_block.front())].size) /
              state.n;
  st.w_freq = static_cast<double>(max_size) / state.n;
  return st;
}

PairwiseTimes pairwise_coalescence_times(const PartitionTrajectory& trajectory,
                                         std::span<const int> labels) {
  const std::size_t m = labels.size();
  PairwiseTimes result;
  result.labels.assign(labels.begin(), labels.end());
  result.d.assign(m * m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < m; ++i) result.d[i * m + i] = 0.0;

  const std::size_t n = static_cast<std::size_t>(trajectory.n);
  std::vector<int> parent(n + 1);
  for (std::size_t i = 0; i <= n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&parent](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  // tracked labels per union-find root
  std::vector<std::vector<int>> tracked(n + 1);
  std::vector<int> index_of_label(n + 1, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const int l = labels[i];
    if (l < 1 || l > trajectory.n) throw std::invalid_argument("label out of range");
    index_of_label[static_cast<std::size_t>(l)] = static_cast<int>(i);
    tracked[static_cast<std::size_t>(l)].push_back(l);
  }

  std::vector<int> roots;
  for (const auto& ev : trajectory.merges) {
    roots.clear();
    for (int l : ev.least_labels) roots.push_back(find(l));
    const int target = ev.least_labels.front();
    // record coalescence times across distinct pre-merge groups
    for (std::size_t a = 0; a < roots.size(); ++a) {
      for (std::size_t b = a + 1; b < roots.size(); ++b) {
        for (int la : tracked[static_cast<std::size_t>(roots[a])]) {
          for (int lb : tracked[static_cast<std::size_t>(roots[b])]) {
            const std::size_t ia =
                static_cast<std::size_t>(index_of_label[static_cast<std::size_t>(la)]);
            const std::size_t ib =
                static_cast<std::size_t>(index_of_label[static_cast<std::size_t>(lb)]);
            result.d[ia * m + ib] = ev.time;
            result.d[ib * m + ia] = ev.time;
          }
        }
      }
    }
    auto& target_list = tracked[static_cast<std::size_t>(target)];
    for (int r : roots) {
      if (r == target) continue;
      auto& src = tracked[static_cast<std::size_t>(r)];
      target_list.insert(target_list.end(), src.begin(), src.end());
      src.clear();
      src.shrink_to_fit();
      parent[static_cast<std::size_t>(r)] = target;
    }
  }
  result.complete = std::none_of(result.d.begin(), result.d.end(),
                                 [](double v) { return std::isnan(v); });
  return result;
}

}  // namespace coalsim
