// core.hpp
//
// Pointer-jumping instances, the brute-force evaluation oracle, and the
// prefix/suffix compositions (pointers and collapsed suffixes) shared by every
// protocol and the adversary.
//
// Vertices are 0-based in memory. Everything that leaves the process (JSON,
// CLI output) is 1-based; see instance_io.hpp.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mpj {

/// Raised for malformed instances, layers and bit strings.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A total function [n] -> [n]; one layer of edges.
class LayerFunction {
 public:
  LayerFunction() = default;
  explicit LayerFunction(std::vector<std::size_t> map);

  static LayerFunction identity(std::size_t n);
  static LayerFunction constant(std::size_t n, std::size_t value);
  /// Builds from 1-based values, e.g. {2,2,4,4}.
  static LayerFunction from_one_based(std::span<const std::size_t> values);
  static LayerFunction from_one_based(std::initializer_list<std::size_t> values);

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator()(std::size_t r) const { return map_.at(r); }
  std::span<const std::size_t> values() const noexcept { return map_; }
  std::vector<std::size_t> to_one_based() const;

  bool is_permutation() const;
  /// Requires is_permutation().
  LayerFunction inverse() const;

  std::vector<std::size_t> preimage(std::size_t s) const;
  std::size_t preimage_size(std::size_t s) const;

  friend auto operator<=>(const LayerFunction&, const LayerFunction&) = default;

 private:
  std::vector<std::size_t> map_;
};

/// outer ∘ inner, i.e. r -> outer(inner(r)).
LayerFunction compose(const LayerFunction& outer, const LayerFunction& inner);

/// A string in {0,1}^n. Position r (0-based) holds x_{r+1}.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::vector<std::uint8_t> bits);

  static BitVector zeros(std::size_t n);
  /// Leftmost character is x_1.
  static BitVector from_string(std::string_view text);
  /// Low n bits of `word`, with x_1 taken from the most significant of them.
  static BitVector from_word(std::uint64_t word, std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t r) const { return bits_.at(r) != 0; }
  void set(std::size_t r, bool value) { bits_.at(r) = value ? 1 : 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t weight() const;
  BitVector complement() const;
  /// x ∘ f, i.e. r -> x_{f(r)}.
  BitVector compose(const LayerFunction& f) const;
  std::string to_string() const;

  friend auto operator<=>(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class Variant { Mpj, MpjHat };

std::string_view to_string(Variant v);

/// Boolean pointer jumping input (i, f_2, ..., f_{k-1}, x).
struct MpjInstance {
  std::size_t n = 0;
  std::size_t i = 0;
  std::vector<LayerFunction> middles;  // f_2 ... f_{k-1}
  BitVector x;

  std::size_t k() const noexcept { return middles.size() + 2; }
  /// f_h for 2 <= h <= k-1.
  const LayerFunction& layer(std::size_t h) const { return middles.at(h - 2); }
  void validate() const;

  friend bool operator==(const MpjInstance&, const MpjInstance&) = default;
};

/// Non-Boolean pointer jumping input (i, f_2, ..., f_k).
struct MpjHatInstance {
  std::size_t n = 0;
  std::size_t i = 0;
  std::vector<LayerFunction> layers;  // f_2 ... f_k
  std::vector<bool> perm_mask;        // empty, or one flag per layer

  std::size_t k() const noexcept { return layers.size() + 1; }
  /// f_h for 2 <= h <= k.
  const LayerFunction& layer(std::size_t h) const { return layers.at(h - 2); }
  void validate() const;

  friend bool operator==(const MpjHatInstance&, const MpjHatInstance&) = default;
};

using Instance = std::variant<MpjInstance, MpjHatInstance>;

Variant variant_of(const Instance& inst);
std::size_t width_of(const Instance& inst);
std::size_t players_of(const Instance& inst);
void validate(const Instance& inst);

/// x_{î_k}, by literal left-to-right pointer following.
bool eval_mpj(const MpjInstance& inst);
/// f_k(î_k).
std::size_t eval_mpj_hat(const MpjHatInstance& inst);
/// Oracle answer as an integer: the bit for Mpj, the vertex for MpjHat.
std::size_t eval(const Instance& inst);

/// Prefix pointers î_j and collapsed suffixes x̂_j / f̂_j of one instance.
/// All accessors take the 1-based player index j.
class DerivedViews {
 public:
  std::size_t k() const noexcept { return k_; }
  /// î_j, 2 <= j <= k.
  std::size_t pointer(std::size_t j) const;
  /// x̂_j, 1 <= j <= k-1 (Boolean instances only).
  const BitVector& suffix_bits(std::size_t j) const;
  /// f̂_j, 1 <= j <= k (hat instances only); f̂_k is the identity.
  const LayerFunction& suffix_map(std::size_t j) const;
  bool boolean() const noexcept { return !xhat_.empty(); }

 private:
  friend DerivedViews derive_views(const MpjInstance&);
  friend DerivedViews derive_views(const MpjHatInstance&);

  std::size_t k_ = 0;
  std::vector<std::size_t> ihat_;     // index j-2
  std::vector<BitVector> xhat_;       // index j-1
  std::vector<LayerFunction> fhat_;   // index j-1
};

DerivedViews derive_views(const MpjInstance& inst);
DerivedViews derive_views(const MpjHatInstance& inst);

/// The 3-player instance (î_j, f_j, x̂_j) embedded at level j, 1 < j < k.
MpjInstance embed_three(const MpjInstance& inst, std::size_t j);

/// Thrown when an exhaustive enumeration would exceed the caller's budget.
class BudgetExceeded : public std::runtime_error {
 public:
  /// `count` is nullopt when the instance count does not fit in 64 bits.
  BudgetExceeded(std::optional<std::uint64_t> count, std::uint64_t budget);
  std::optional<std::uint64_t> count() const noexcept { return count_; }

 private:
  std::optional<std::uint64_t> count_;
};

/// Single-consumer source of instances.
class InstanceStream {
 public:
  virtual ~InstanceStream() = default;
  virtual std::optional<Instance> next() = 0;
};

/// Number of instances of the given shape; nullopt on 64-bit overflow.
/// `perm_mask` is empty or has one flag per layer (k-2 for Mpj, k-1 for MpjHat).
std::optional<std::uint64_t> instance_count(std::size_t n, std::size_t k, Variant variant,
                                            const std::vector<bool>& perm_mask);

/// Exhaustive, duplicate-free enumeration in lexicographic order of
/// (i, f_2, ..., x); permutation layers advance in std::next_permutation order.
class InstanceEnumerator final : public InstanceStream {
 public:
  InstanceEnumerator(std::size_t n, std::size_t k, Variant variant, std::vector<bool> perm_mask,
                     std::uint64_t budget);

  std::uint64_t count() const noexcept { return count_; }
  std::optional<Instance> next() override;

 private:
  bool advance();
  Instance current() const;

  std::size_t n_;
  std::size_t k_;
  Variant variant_;
  std::vector<bool> perm_mask_;
  std::uint64_t count_;
  bool done_ = false;
  std::size_t i_ = 0;
  std::vector<std::vector<std::size_t>> layers_;
  std::vector<std::uint8_t> x_;
};

Instance sample_instance(std::size_t n, std::size_t k, Variant variant,
                         const std::vector<bool>& perm_mask, std::uint64_t seed);

/// `count` independent samples; sample t uses a seed derived from (seed, t).
class SampleStream final : public InstanceStream {
 public:
  SampleStream(std::size_t n, std::size_t k, Variant variant, std::vector<bool> perm_mask,
               std::uint64_t seed, std::uint64_t count);
  std::optional<Instance> next() override;

 private:
  std::size_t n_;
  std::size_t k_;
  Variant variant_;
  std::vector<bool> perm_mask_;
  std::uint64_t seed_;
  std::uint64_t count_;
  std::uint64_t produced_ = 0;
};

/// splitmix64 finaliser; used to derive per-sample seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// ceil(log2 n), the width of a hat-variant answer.
std::size_t ceil_log2(std::size_t n);

}  // namespace mpj
