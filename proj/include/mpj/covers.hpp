// covers.hpp
//
// Small sets of permutations that agree with an arbitrary function f on
// every point whose fiber is small (d-covers), or on every small-fiber point
// of a scope S (S,d-covers).
#pragma once

#include "mpj/core.hpp"

namespace mpj {

/// Range values s_1 < ... < s_t of f with fibers A_i = f^{-1}(s_i) and
/// matching blocks B_i, |B_i| = |A_i|, B_i ∩ Range(f) = {s_i}.
/// All sets are sorted ascending.
struct FiberPartition {
  std::vector<std::size_t> range;
  std::vector<std::vector<std::size_t>> fibers;
  std::vector<std::vector<std::size_t>> blocks;
};

/// Blocks are filled in order i = 1..t: B_i = {s_i} plus the |A_i| - 1
/// smallest non-range values not yet used.
FiberPartition build_fiber_partition(const LayerFunction& f);

struct CoverSet {
  std::vector<LayerFunction> perms;  // always exactly d entries, ℓ = 1..d
  std::size_t d = 0;
  LayerFunction target;
  std::optional<std::vector<std::size_t>> scope;  // S, sorted
};

struct CoverCheck {
  bool covered = false;
  std::optional<std::size_t> witness;  // smallest uncovered point

  explicit operator bool() const noexcept { return covered; }
};

/// (a mod b) with values in {1, ..., b}.
std::size_t mod_range(long long a, std::size_t b);

CoverSet build_d_cover(const LayerFunction& f, std::size_t d);
CoverCheck verify_d_cover(std::span<const LayerFunction> perms, const LayerFunction& f,
                          std::size_t d);

/// `scope` need not be sorted; duplicates are ignored.
CoverSet build_sd_cover(const LayerFunction& f, std::span<const std::size_t> scope, std::size_t d);
CoverCheck verify_sd_cover(std::span<const LayerFunction> perms, const LayerFunction& f,
                           std::span<const std::size_t> scope, std::size_t d);

}  // namespace mpj
