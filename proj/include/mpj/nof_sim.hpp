// nof_sim.hpp
//
// One-way blackboard runtime for number-on-the-forehead protocols.
//
// Players 1..k speak once each, in order. Player j only ever receives a
// PlayerView: the view is assembled by the runtime from the instance, and the
// layer on player j's forehead is never copied into it. Under the collapsing
// kinds the layers ahead of player j are likewise not copied; only their
// composition is.
#pragma once

#include "mpj/core.hpp"

#include <functional>
#include <iosfwd>
#include <map>

namespace mpj {

enum class ViewKind { FullOneWay, Collapsing, ConservativeCollapsing };

std::string_view to_string(ViewKind kind);

/// Raised when a protocol breaks the runtime contract: nondeterministic
/// player, malformed output message, exceeded declared bound, failed audit.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an instance falls outside a protocol's domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exact-length bit string written on the blackboard.
class Message {
 public:
  Message() = default;
  static Message from_string(std::string_view text);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool bit(std::size_t pos) const { return bits_.at(pos) != 0; }

  void push_back(bool b) { bits_.push_back(b ? 1 : 0); }
  /// `width` bits of `value`, most significant first.
  void append_uint(std::uint64_t value, std::size_t width);
  void append(const Message& other);
  void append(const BitVector& bits);

  std::uint64_t read_uint(std::size_t offset, std::size_t width) const;
  Message slice(std::size_t offset, std::size_t length) const;
  BitVector read_bits(std::size_t offset, std::size_t length) const;

  std::string to_string() const;

  friend auto operator<=>(const Message&, const Message&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// The collapsed layers ahead of a player: x̂_j for the Boolean problem,
/// f̂_j for the hat problem, nothing for the last Boolean player.
using Suffix = std::variant<std::monostate, BitVector, LayerFunction>;

/// Everything player j may read. Fields a view kind hides are simply absent.
class PlayerView {
 public:
  struct Parts {
    std::size_t player = 0;
    std::size_t n = 0;
    std::size_t k = 0;
    Variant variant = Variant::Mpj;
    ViewKind kind = ViewKind::FullOneWay;
    std::optional<std::size_t> start;        // i
    std::vector<LayerFunction> prefix;       // f_2 .. f_{j-1}
    std::optional<std::size_t> pointer;      // î_j
    Suffix suffix;                           // x̂_j or f̂_j
    std::vector<LayerFunction> ahead;        // f_{j+1} .. (FullOneWay only)
    std::optional<BitVector> tail;           // x (FullOneWay Boolean only)
    std::vector<Message> transcript;         // messages of players 1..j-1
  };

  /// Checks that `parts` exposes nothing the kind forbids.
  explicit PlayerView(Parts parts);

  std::size_t player() const noexcept { return p_.player; }
  std::size_t n() const noexcept { return p_.n; }
  std::size_t k() const noexcept { return p_.k; }
  Variant variant() const noexcept { return p_.variant; }
  ViewKind kind() const noexcept { return p_.kind; }

  const std::optional<std::size_t>& start() const noexcept { return p_.start; }
  std::span<const LayerFunction> prefix_layers() const noexcept { return p_.prefix; }
  const std::optional<std::size_t>& pointer() const noexcept { return p_.pointer; }
  const Suffix& suffix() const noexcept { return p_.suffix; }
  std::span<const LayerFunction> ahead_layers() const noexcept { return p_.ahead; }
  const std::optional<BitVector>& tail() const noexcept { return p_.tail; }
  std::span<const Message> transcript() const noexcept { return p_.transcript; }

  /// Throw std::logic_error when the suffix has the other type.
  const BitVector& suffix_bits() const;
  const LayerFunction& suffix_map() const;
  /// Message of player h < j.
  const Message& message(std::size_t h) const;
  /// f_h for 2 <= h <= j-1.
  const LayerFunction& prefix_layer(std::size_t h) const;
  /// f_h for h > j (FullOneWay only).
  const LayerFunction& ahead_layer(std::size_t h) const;

 private:
  Parts p_;
};

/// The view player j gets of `inst`, with `transcript` holding the messages
/// of players 1..j-1.
PlayerView make_view(const Instance& inst, std::size_t j, ViewKind kind,
                     std::span<const Message> transcript);

using PlayerFn = std::function<Message(const PlayerView&)>;

struct Transcript {
  std::vector<Message> messages;
  std::size_t output = 0;  // bit, or 0-based vertex
  std::vector<std::size_t> per_player_bits;

  std::size_t total_cost() const;
  /// Bits of players 1..k-1, i.e. everything but the answer.
  std::size_t message_cost() const;
};

struct ProtocolHandle {
  std::string name;
  std::size_t n = 0;
  std::size_t k = 0;
  Variant variant = Variant::Mpj;
  ViewKind view = ViewKind::FullOneWay;
  std::vector<PlayerFn> players;
  /// Bound t on the message length of each of players 1..k-1.
  std::optional<std::size_t> declared_max_bits;
  /// Rejects instances outside the protocol's domain (throws PreconditionError).
  std::function<void(const Instance&)> precondition;
  /// Post-run invariant check with full knowledge of the instance; not a player.
  std::function<void(const Instance&, const Transcript&)> audit;
};

/// Width of the final message: 1 for Mpj, ceil(log2 n) for MpjHat.
std::size_t output_width(Variant variant, std::size_t n);
Message encode_output(Variant variant, std::size_t n, std::size_t value);

struct RunOptions {
  /// Call every player twice on the same view and demand equal messages.
  bool replay_check = true;
};

Transcript run(const ProtocolHandle& protocol, const Instance& inst, RunOptions options = {});

struct VerifyFailure {
  Instance instance;
  std::size_t expected = 0;
  std::size_t got = 0;
};

struct VerifyReport {
  std::uint64_t checked = 0;
  std::vector<VerifyFailure> failures;
  std::size_t worst_cost = 0;          // total, answer included
  std::size_t worst_message_cost = 0;  // players 1..k-1
  std::vector<std::size_t> per_player_max_bits;

  bool ok() const noexcept { return failures.empty(); }
};

struct VerifyOptions {
  RunOptions run;
  /// Called after each instance with its transcript.
  std::function<void(const Instance&, const Transcript&)> on_run;
};

VerifyReport verify(const ProtocolHandle& protocol, InstanceStream& source,
                    const VerifyOptions& options = {});

struct CostRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string protocol;
  ViewKind view = ViewKind::FullOneWay;
  std::size_t max_cost = 0;
  std::size_t max_message_cost = 0;
  std::vector<std::size_t> per_player_max;
  std::uint64_t checked = 0;
  std::size_t failures = 0;
};

using ProtocolFactory = std::function<ProtocolHandle(std::size_t n)>;
using Sampler = std::function<std::unique_ptr<InstanceStream>(std::size_t n)>;

std::vector<CostRow> cost_profile(const ProtocolFactory& factory,
                                  std::span<const std::size_t> n_values, const Sampler& sampler);

/// `n,k,protocol,view,max_cost,p1_bits,...,pk_bits`
std::string cost_csv_header(std::size_t k);
std::string cost_csv_row(const CostRow& row);

}  // namespace mpj
