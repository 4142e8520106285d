// adversary.hpp
//
// Fooling-pair construction against collapsing protocols for Boolean pointer
// jumping in which players 1..k-1 send at most n - (1/2) log2 n - 2 bits.
//
// Level by level, the adversary finds two strings (x, x') that the current
// player cannot tell apart and that realise all four bit patterns; the next
// layer is then chosen so that the earlier pair factors through the new one.
// After k-1 levels the two completed inputs share every message of players
// 1..k-1 yet have different answers.
#pragma once

#include "mpj/nof_sim.hpp"

#include <array>

namespace mpj {

/// I_ab(x, x') for (a, b) in {00, 01, 10, 11}, each ascending.
struct IabSets {
  std::array<std::vector<std::size_t>, 4> sets;

  const std::vector<std::size_t>& get(bool a, bool b) const { return sets[(a ? 2 : 0) + (b ? 1 : 0)]; }
};

IabSets iab_sets(const BitVector& x, const BitVector& y);
bool is_crossing(const BitVector& x, const BitVector& y);

struct CrossingPair {
  BitVector x;
  BitVector y;
};

/// Any crossing pair in `cell`, trying half-weight members first.
std::optional<CrossingPair> find_crossing_pair(std::span<const BitVector> cell);

/// All strings of length n (even) with weight n/2, in lexicographic order.
std::vector<BitVector> half_weight_strings(std::size_t n);

/// n - (1/2) log2 n - 2.
double message_bound(std::size_t n);
/// Whether a per-player limit t satisfies t <= n - (1/2) log2 n - 2.
bool within_message_bound(std::size_t t, std::size_t n);

/// Raised when the counting guarantee fails; only possible when the message
/// function breaks the length bound it was promised to respect.
class AdversaryFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using MessageFn = std::function<Message(const BitVector&)>;

struct CrossedCell {
  Message value;
  CrossingPair pair;
  std::size_t half_weight_members = 0;
};

/// Groups the half-weight strings by message value and returns the first
/// crossed cell in message order. Throws PreconditionError if t_bound breaks
/// the bound or a message is longer than t_bound.
CrossedCell find_crossed_cell(std::size_t n, const MessageFn& msg, std::size_t t_bound);

struct FoolingPair {
  MpjInstance inst0;  // answer 0
  MpjInstance inst1;  // answer 1
  std::vector<Message> transcript_prefix;  // players 1..k-1
};

/// Requires a Boolean, collapsing protocol with declared_max_bits within the
/// bound and even n; throws PreconditionError otherwise.
FoolingPair build_fooling_inputs(const ProtocolHandle& protocol);

struct FoolingReport {
  bool rejected = false;  // protocol outside the adversary's preconditions
  std::string reason;
  bool degenerate = false;  // inst0 == inst1
  bool differ_only_in_last_layer = false;
  bool prefix_equal = false;
  std::size_t errors = 0;  // outputs that disagree with the oracle
  std::array<std::size_t, 2> outputs{};
  std::array<std::size_t, 2> expected{};

  bool fooled() const noexcept {
    return !rejected && !degenerate && differ_only_in_last_layer && prefix_equal && errors == 1;
  }
};

FoolingReport verify_fooling(const ProtocolHandle& protocol, const MpjInstance& inst0,
                             const MpjInstance& inst1);

// ---------------------------------------------------------------------------
// A family of collapsing Boolean protocols to attack. Players 1..k-1 send
// exactly t bits computed from their collapsing view; player k guesses.

/// First t bits of x̂_j. Player k answers x_{î_k} when î_k <= t, else 0.
ProtocolHandle truncation_protocol(std::size_t n, std::size_t k, std::size_t t);
/// t parities of x̂_j over seeded random masks.
ProtocolHandle parity_protocol(std::size_t n, std::size_t k, std::size_t t, std::uint64_t seed);
/// t bits of a seeded hash of the whole view.
ProtocolHandle hash_protocol(std::size_t n, std::size_t k, std::size_t t, std::uint64_t seed);
/// Players 1..k-1 send x̂_j in full (n bits); correct, and outside the bound.
ProtocolHandle full_suffix_protocol(std::size_t n, std::size_t k);

/// `count` protocols cycling truncation, parity and hash message functions
/// over t = 0 .. floor(n - (1/2) log2 n - 2), with seeds drawn from `seed`.
std::vector<ProtocolHandle> collapsing_family(std::size_t n, std::size_t k, std::size_t count,
                                              std::uint64_t seed);

}  // namespace mpj
