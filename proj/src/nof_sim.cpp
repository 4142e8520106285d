#include "mpj/nof_sim.hpp"

#include <algorithm>
#include <sstream>

namespace mpj {

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::FullOneWay: return "full";
    case ViewKind::Collapsing: return "collapsing";
    case ViewKind::ConservativeCollapsing: return "conservative-collapsing";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Message

Message Message::from_string(std::string_view text) {
  Message m;
  for (char c : text) {
    if (c != '0' && c != '1') throw ValidationError("message may only contain '0' and '1'");
    m.push_back(c == '1');
  }
  return m;
}

void Message::append_uint(std::uint64_t value, std::size_t width) {
  if (width < 64 && (value >> width) != 0) {
    throw std::out_of_range("value " + std::to_string(value) + " does not fit in " +
                            std::to_string(width) + " bits");
  }
  for (std::size_t b = width; b-- > 0;) push_back(b < 64 && ((value >> b) & 1U));
}

void Message::append(const Message& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void Message::append(const BitVector& bits) {
  bits_.insert(bits_.end(), bits.bits().begin(), bits.bits().end());
}

std::uint64_t Message::read_uint(std::size_t offset, std::size_t width) const {
  if (width > 64 || offset + width > bits_.size()) {
    throw std::out_of_range("read of " + std::to_string(width) + " bits at " +
                            std::to_string(offset) + " past message end " +
                            std::to_string(bits_.size()));
  }
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < width; ++b) v = (v << 1) | bits_[offset + b];
  return v;
}

Message Message::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > bits_.size()) throw std::out_of_range("slice past message end");
  Message m;
  m.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(offset),
                 bits_.begin() + static_cast<std::ptrdiff_t>(offset + length));
  return m;
}

BitVector Message::read_bits(std::size_t offset, std::size_t length) const {
  if (offset + length > bits_.size()) throw std::out_of_range("read past message end");
  return BitVector(std::vector<std::uint8_t>(
      bits_.begin() + static_cast<std::ptrdiff_t>(offset),
      bits_.begin() + static_cast<std::ptrdiff_t>(offset + length)));
}

std::string Message::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------------------
// PlayerView

PlayerView::PlayerView(Parts parts) : p_(std::move(parts)) {
  const std::size_t j = p_.player;
  if (p_.k < 2 || j < 1 || j > p_.k) throw std::invalid_argument("player index outside 1..k");
  if (p_.transcript.size() != j - 1) {
    throw std::invalid_argument("player " + std::to_string(j) + " must see exactly " +
                                std::to_string(j - 1) + " earlier messages");
  }
  if (j == 1 && (p_.start || p_.pointer || !p_.prefix.empty())) {
    throw std::invalid_argument("player 1 cannot see the start vertex");
  }
  if (p_.kind != ViewKind::FullOneWay && (!p_.ahead.empty() || p_.tail)) {
    throw std::invalid_argument("collapsing views carry only the suffix composition");
  }
  if (p_.kind == ViewKind::ConservativeCollapsing && (p_.start || !p_.prefix.empty())) {
    throw std::invalid_argument("conservative views carry only the pointer î_j");
  }
  if (p_.kind != ViewKind::ConservativeCollapsing && j >= 2) {
    if (!p_.start || p_.prefix.size() != j - 2) {
      throw std::invalid_argument("view of player " + std::to_string(j) +
                                  " needs i and f_2..f_{j-1}");
    }
  }
  if (j == p_.k && p_.variant == Variant::Mpj && (p_.tail || p_.suffix.index() != 0)) {
    throw std::invalid_argument("the last Boolean player cannot see x");
  }
}

const BitVector& PlayerView::suffix_bits() const {
  if (const auto* b = std::get_if<BitVector>(&p_.suffix)) return *b;
  throw std::logic_error("view has no Boolean suffix");
}

const LayerFunction& PlayerView::suffix_map() const {
  if (const auto* f = std::get_if<LayerFunction>(&p_.suffix)) return *f;
  throw std::logic_error("view has no layer-valued suffix");
}

const Message& PlayerView::message(std::size_t h) const {
  if (h < 1 || h > p_.transcript.size()) throw std::out_of_range("message index");
  return p_.transcript[h - 1];
}

const LayerFunction& PlayerView::prefix_layer(std::size_t h) const {
  if (h < 2 || h - 2 >= p_.prefix.size()) throw std::out_of_range("prefix layer not visible");
  return p_.prefix[h - 2];
}

const LayerFunction& PlayerView::ahead_layer(std::size_t h) const {
  if (h <= p_.player || h - p_.player - 1 >= p_.ahead.size()) {
    throw std::out_of_range("layer ahead not visible");
  }
  return p_.ahead[h - p_.player - 1];
}

namespace {

PlayerView view_from(const Instance& inst, const DerivedViews& dv, std::size_t j, ViewKind kind,
                     std::span<const Message> transcript) {
  PlayerView::Parts p;
  p.player = j;
  p.n = width_of(inst);
  p.k = players_of(inst);
  p.variant = variant_of(inst);
  p.kind = kind;
  p.transcript.assign(transcript.begin(), transcript.end());

  const auto layer = [&](std::size_t h) -> const LayerFunction& {
    return std::visit([h](const auto& v) -> const LayerFunction& { return v.layer(h); }, inst);
  };

  if (j >= 2) {
    p.pointer = dv.pointer(j);
    if (kind != ViewKind::ConservativeCollapsing) {
      p.start = std::visit([](const auto& v) { return v.i; }, inst);
      for (std::size_t h = 2; h < j; ++h) p.prefix.push_back(layer(h));
    }
  }

  if (p.variant == Variant::Mpj) {
    if (j < p.k) p.suffix = dv.suffix_bits(j);
    if (kind == ViewKind::FullOneWay && j < p.k) {
      for (std::size_t h = j + 1; h < p.k; ++h) p.ahead.push_back(layer(h));
      p.tail = std::get<MpjInstance>(inst).x;
    }
  } else {
    p.suffix = dv.suffix_map(j);
    if (kind == ViewKind::FullOneWay) {
      for (std::size_t h = j + 1; h <= p.k; ++h) p.ahead.push_back(layer(h));
    }
  }
  return PlayerView(std::move(p));
}

DerivedViews views_of(const Instance& inst) {
  return std::visit([](const auto& v) { return derive_views(v); }, inst);
}

}  // namespace

PlayerView make_view(const Instance& inst, std::size_t j, ViewKind kind,
                     std::span<const Message> transcript) {
  return view_from(inst, views_of(inst), j, kind, transcript);
}

// ---------------------------------------------------------------------------
// Running

std::size_t Transcript::total_cost() const {
  std::size_t total = 0;
  for (auto b : per_player_bits) total += b;
  return total;
}

std::size_t Transcript::message_cost() const {
  return per_player_bits.empty() ? 0 : total_cost() - per_player_bits.back();
}

std::size_t output_width(Variant variant, std::size_t n) {
  return variant == Variant::Mpj ? 1 : ceil_log2(n);
}

Message encode_output(Variant variant, std::size_t n, std::size_t value) {
  Message m;
  m.append_uint(value, output_width(variant, n));
  return m;
}

Transcript run(const ProtocolHandle& protocol, const Instance& inst, RunOptions options) {
  validate(inst);
  const std::size_t k = players_of(inst);
  const std::size_t n = width_of(inst);
  if (protocol.k != k || protocol.variant != variant_of(inst)) {
    throw PreconditionError("protocol '" + protocol.name + "' expects k = " +
                            std::to_string(protocol.k) + " (" +
                            std::string(to_string(protocol.variant)) + "), instance has k = " +
                            std::to_string(k) + " (" + std::string(to_string(variant_of(inst))) +
                            ")");
  }
  if (protocol.n != 0 && protocol.n != n) {
    throw PreconditionError("protocol '" + protocol.name + "' is built for n = " +
                            std::to_string(protocol.n) + ", instance has n = " +
                            std::to_string(n));
  }
  if (protocol.players.size() != k) {
    throw ContractViolation("protocol '" + protocol.name + "' does not define k players");
  }
  if (protocol.precondition) protocol.precondition(inst);

  const DerivedViews dv = views_of(inst);
  Transcript t;
  t.messages.reserve(k);
  for (std::size_t j = 1; j <= k; ++j) {
    const PlayerView view = view_from(inst, dv, j, protocol.view, t.messages);
    Message msg = protocol.players[j - 1](view);
    if (options.replay_check && protocol.players[j - 1](view) != msg) {
      throw ContractViolation("player " + std::to_string(j) + " of '" + protocol.name +
                              "' is not deterministic");
    }
    if (j < k && protocol.declared_max_bits && msg.size() > *protocol.declared_max_bits) {
      throw ContractViolation("player " + std::to_string(j) + " of '" + protocol.name +
                              "' sent " + std::to_string(msg.size()) +
                              " bits, above its declared bound " +
                              std::to_string(*protocol.declared_max_bits));
    }
    t.per_player_bits.push_back(msg.size());
    t.messages.push_back(std::move(msg));
  }

  const Message& last = t.messages.back();
  const std::size_t width = output_width(protocol.variant, n);
  if (last.size() != width) {
    throw ContractViolation("final message of '" + protocol.name + "' has " +
                            std::to_string(last.size()) + " bits, expected " +
                            std::to_string(width));
  }
  t.output = static_cast<std::size_t>(last.read_uint(0, width));
  if (protocol.variant == Variant::MpjHat && t.output >= n) {
    throw ContractViolation("final message encodes a vertex outside [n]");
  }
  if (protocol.audit) protocol.audit(inst, t);
  return t;
}

VerifyReport verify(const ProtocolHandle& protocol, InstanceStream& source,
                    const VerifyOptions& options) {
  VerifyReport report;
  report.per_player_max_bits.assign(protocol.k, 0);
  while (auto inst = source.next()) {
    const Transcript t = run(protocol, *inst, options.run);
    const std::size_t expected = eval(*inst);
    ++report.checked;
    if (t.output != expected) report.failures.push_back({*inst, expected, t.output});
    report.worst_cost = std::max(report.worst_cost, t.total_cost());
    report.worst_message_cost = std::max(report.worst_message_cost, t.message_cost());
    for (std::size_t j = 0; j < t.per_player_bits.size(); ++j) {
      report.per_player_max_bits[j] = std::max(report.per_player_max_bits[j],
                                               t.per_player_bits[j]);
    }
    if (options.on_run) options.on_run(*inst, t);
  }
  return report;
}

std::vector<CostRow> cost_profile(const ProtocolFactory& factory,
                                  std::span<const std::size_t> n_values, const Sampler& sampler) {
  std::vector<CostRow> rows;
  for (std::size_t n : n_values) {
    const ProtocolHandle protocol = factory(n);
    auto source = sampler(n);
    const VerifyReport report = verify(protocol, *source);
    CostRow row;
    row.n = n;
    row.k = protocol.k;
    row.protocol = protocol.name;
    row.view = protocol.view;
    row.max_cost = report.worst_cost;
    row.max_message_cost = report.worst_message_cost;
    row.per_player_max = report.per_player_max_bits;
    row.checked = report.checked;
    row.failures = report.failures.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string cost_csv_header(std::size_t k) {
  std::string h = "n,k,protocol,view,max_cost";
  for (std::size_t j = 1; j <= k; ++j) h += ",p" + std::to_string(j) + "_bits";
  return h;
}

std::string cost_csv_row(const CostRow& row) {
  std::ostringstream os;
  os << row.n << ',' << row.k << ',' << row.protocol << ',' << to_string(row.view) << ','
     << row.max_cost;
  for (auto b : row.per_player_max) os << ',' << b;
  return os.str();
}

}  // namespace mpj
