#include "mpj/covers.hpp"

#include <algorithm>

namespace mpj {

namespace {

std::vector<std::size_t> normalise_scope(std::span<const std::size_t> scope, std::size_t n) {
  std::vector<std::size_t> s(scope.begin(), scope.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (!s.empty() && s.back() >= n) throw ValidationError("scope element outside [n]");
  return s;
}

void require_positive(std::size_t d) {
  if (d == 0) throw std::invalid_argument("cover size d must be positive");
}

// π_ℓ(a_{i,j}) = b_{i,(j-ℓ) mod |B_i|} over every fiber, for ℓ = 1..d.
// `fibers` and `blocks` give a_{i,·} and b_{i,·} in their index order.
std::vector<LayerFunction> rotate_fibers(std::size_t n,
                                         const std::vector<std::vector<std::size_t>>& fibers,
                                         const std::vector<std::vector<std::size_t>>& blocks,
                                         std::size_t d) {
  std::vector<LayerFunction> perms;
  perms.reserve(d);
  for (std::size_t ell = 1; ell <= d; ++ell) {
    std::vector<std::size_t> map(n);
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      const auto& a = fibers[i];
      const auto& b = blocks[i];
      for (std::size_t j = 1; j <= a.size(); ++j) {
        const long long shift = static_cast<long long>(j) - static_cast<long long>(ell);
        map[a[j - 1]] = b[mod_range(shift, b.size()) - 1];
      }
    }
    perms.emplace_back(std::move(map));
  }
  return perms;
}

bool hit_by_some(std::span<const LayerFunction> perms, const LayerFunction& f, std::size_t r) {
  return std::any_of(perms.begin(), perms.end(),
                     [&](const LayerFunction& pi) { return pi(r) == f(r); });
}

}  // namespace

std::size_t mod_range(long long a, std::size_t b) {
  if (b == 0) throw std::invalid_argument("mod_range with b = 0");
  const long long m = static_cast<long long>(b);
  return static_cast<std::size_t>((((a - 1) % m) + m) % m + 1);
}

FiberPartition build_fiber_partition(const LayerFunction& f) {
  const std::size_t n = f.size();
  FiberPartition p;
  std::vector<bool> in_range(n, false);
  for (std::size_t r = 0; r < n; ++r) in_range[f(r)] = true;
  for (std::size_t s = 0; s < n; ++s) {
    if (in_range[s]) p.range.push_back(s);
  }

  std::vector<std::size_t> spare;  // non-range values, ascending
  for (std::size_t s = 0; s < n; ++s) {
    if (!in_range[s]) spare.push_back(s);
  }

  std::size_t next_spare = 0;
  for (std::size_t s : p.range) {
    auto fiber = f.preimage(s);
    std::vector<std::size_t> block{s};
    for (std::size_t c = 1; c < fiber.size(); ++c) block.push_back(spare[next_spare++]);
    std::sort(block.begin(), block.end());
    p.fibers.push_back(std::move(fiber));
    p.blocks.push_back(std::move(block));
  }
  return p;
}

CoverSet build_d_cover(const LayerFunction& f, std::size_t d) {
  require_positive(d);
  const FiberPartition p = build_fiber_partition(f);
  return CoverSet{rotate_fibers(f.size(), p.fibers, p.blocks, d), d, f, std::nullopt};
}

CoverCheck verify_d_cover(std::span<const LayerFunction> perms, const LayerFunction& f,
                          std::size_t d) {
  for (std::size_t r = 0; r < f.size(); ++r) {
    if (hit_by_some(perms, f, r)) continue;
    if (f.preimage_size(f(r)) > d) continue;
    return CoverCheck{false, r};
  }
  return CoverCheck{true, std::nullopt};
}

CoverSet build_sd_cover(const LayerFunction& f, std::span<const std::size_t> scope,
                        std::size_t d) {
  require_positive(d);
  const std::size_t n = f.size();
  auto s = normalise_scope(scope, n);
  std::vector<bool> in_scope(n, false);
  for (auto r : s) in_scope[r] = true;

  FiberPartition p = build_fiber_partition(f);
  for (std::size_t i = 0; i < p.range.size(); ++i) {
    // a_{i,·}: members of S first, then the rest; each group ascending.
    std::stable_partition(p.fibers[i].begin(), p.fibers[i].end(),
                          [&](std::size_t r) { return in_scope[r]; });
    // b_{i,·}: B_i \ {s_i} ascending, then s_i last.
    auto& block = p.blocks[i];
    block.erase(std::find(block.begin(), block.end(), p.range[i]));
    block.push_back(p.range[i]);
  }
  return CoverSet{rotate_fibers(n, p.fibers, p.blocks, d), d, f, std::move(s)};
}

CoverCheck verify_sd_cover(std::span<const LayerFunction> perms, const LayerFunction& f,
                           std::span<const std::size_t> scope, std::size_t d) {
  const auto s = normalise_scope(scope, f.size());
  std::vector<bool> in_scope(f.size(), false);
  for (auto r : s) in_scope[r] = true;
  for (std::size_t r : s) {
    if (hit_by_some(perms, f, r)) continue;
    std::size_t fiber_in_scope = 0;
    for (std::size_t q = 0; q < f.size(); ++q) {
      if (in_scope[q] && f(q) == f(r)) ++fiber_in_scope;
    }
    if (fiber_in_scope > d) continue;
    return CoverCheck{false, r};
  }
  return CoverCheck{true, std::nullopt};
}

}  // namespace mpj
