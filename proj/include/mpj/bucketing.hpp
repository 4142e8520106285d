// bucketing.hpp
//
// Collapsing protocol for hat pointer jumping over permutation layers.
// Player 1 announces, for every start vertex, a coarse bucket of the answer;
// each later player narrows the bucket that holds the true answer and
// re-announces it at a finer granularity, until buckets are singletons.
#pragma once

#include "mpj/nof_sim.hpp"

namespace mpj {

/// log^{(i)} n: i-fold log2, starting from log^{(0)} n = n. Stops early once
/// the value is <= 1.
double iterated_log(double n, std::size_t i);

/// B_j = {r in [n] : ceil(2^t r / n) = j} for j = 1..2^t (1-based formula;
/// the class itself is 0-based in both r and j).
class BucketingScheme {
 public:
  BucketingScheme(std::size_t t, std::size_t n);

  std::size_t bits() const noexcept { return t_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t bucket_count() const noexcept { return std::size_t{1} << t_; }
  /// ceil(n / 2^t).
  std::size_t max_bucket_size() const noexcept;

  std::size_t index(std::size_t r) const;
  /// Ascending; may be empty when 2^t > n.
  std::vector<std::size_t> members(std::size_t j) const;
  bool contains(std::size_t j, std::size_t r) const { return index(r) == j; }

 private:
  std::size_t t_;
  std::size_t n_;
};

struct BucketPlan {
  std::size_t n = 0;
  std::size_t k = 0;
  bool doubling = false;
  /// b[j-1] = b_j for j = 1..k. Silent players carry 0; b_k = n.
  std::vector<std::size_t> b;
  /// Last player that speaks before the answer (1 <= last_active <= k-1).
  std::size_t last_active = 0;

  std::size_t bits(std::size_t j) const { return b.at(j - 1); }
};

/// b_j = max(1, ceil(log^{(k-j)} n)).
BucketPlan make_bucket_plan(std::size_t n, std::size_t k);
/// b_1 as above, then b_{j+1} = min(ceil(log2 n), 2 b_j) until buckets are
/// singletons; later players are silent.
BucketPlan make_doubling_plan(std::size_t n, std::size_t k);

ProtocolHandle bucketing_protocol(std::size_t n, std::size_t k);
ProtocolHandle bucketing_protocol_doubling(std::size_t n, std::size_t k);
ProtocolHandle bucketing_protocol(const BucketPlan& plan);

/// Exact length of player j's message given |S_j| (ignored for j = 1).
std::size_t bucketing_message_bits(const BucketPlan& plan, std::size_t j, std::size_t s_size);
/// Upper bound on the summed length of players 1..k-1.
std::size_t bucketing_cost_bound(const BucketPlan& plan);

}  // namespace mpj
