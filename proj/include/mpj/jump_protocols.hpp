// jump_protocols.hpp
//
// Upper-bound protocols for Boolean pointer jumping: the INDEX baseline, the
// 3-player cover protocol and its k-player generalisation. Both sublinear
// protocols run a black-box 3-player protocol for the permutation special
// case once per cover permutation.
#pragma once

#include "mpj/covers.hpp"
#include "mpj/nof_sim.hpp"

namespace mpj {

/// A one-way protocol for (i, π, x) -> x_{π(i)} with π a permutation.
/// Each of alpha and beta produces exactly m bits.
struct PermProtocol3 {
  std::string name;
  std::size_t n = 0;
  std::size_t m = 0;
  std::function<Message(const LayerFunction& pi, const BitVector& x)> alpha;
  std::function<Message(std::size_t i, const BitVector& x, const Message& alpha)> beta;
  std::function<bool(std::size_t i, const LayerFunction& pi, const Message& alpha,
                     const Message& beta)>
      gamma;
};

/// Baseline: alpha sends x, beta sends m zero bits, gamma reads alpha at π(i).
PermProtocol3 naive_perm_protocol(std::size_t n);

struct PermProtocolCheck {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;
};

/// Runs the correctness contract over every (i, π, x); n! 2^n n triples.
PermProtocolCheck check_perm_protocol(const PermProtocol3& p);

/// k = 2: player 1 writes x, player 2 answers x_i.
ProtocolHandle index_protocol(std::size_t n);

ProtocolHandle mpj3_sublinear(const PermProtocol3& p, std::size_t d);
ProtocolHandle mpjk_sublinear(const PermProtocol3& p, std::size_t d, std::size_t k);

/// ceil(1 / ((k-2) φ)^{1/(k-1)}).
std::size_t choose_d(std::size_t k, double phi);

/// S_1 = [n], S_j = {s : |S_{j-1} ∩ f_j^{-1}(s)| > d} for j = 2..k-1.
class SjChain {
 public:
  SjChain(std::vector<std::vector<std::size_t>> sets) : sets_(std::move(sets)) {}
  /// Number of sets, i.e. k - 1.
  std::size_t size() const noexcept { return sets_.size(); }
  /// S_j, sorted ascending.
  const std::vector<std::size_t>& set(std::size_t j) const { return sets_.at(j - 1); }
  bool contains(std::size_t j, std::size_t s) const;
  /// Position of s in S_j; s must be a member.
  std::size_t rank(std::size_t j, std::size_t s) const;

 private:
  std::vector<std::vector<std::size_t>> sets_;
};

/// `middles` are f_2..f_{k-1}.
SjChain build_sj_chain(std::span<const LayerFunction> middles, std::size_t n, std::size_t d);

}  // namespace mpj
