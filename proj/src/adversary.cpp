#include "mpj/adversary.hpp"

#include <bit>
#include <cmath>
#include <map>

namespace mpj {

namespace {

PlayerView collapsing_view(std::size_t n, std::size_t k, std::size_t player, std::size_t start,
                           const std::vector<LayerFunction>& layers, const BitVector& suffix,
                           const std::vector<Message>& transcript) {
  PlayerView::Parts p;
  p.player = player;
  p.n = n;
  p.k = k;
  p.variant = Variant::Mpj;
  p.kind = ViewKind::Collapsing;
  if (player >= 2) {
    p.start = start;
    p.prefix = layers;
    std::size_t pointer = start;
    for (const auto& f : layers) pointer = f(pointer);
    p.pointer = pointer;
  }
  p.suffix = suffix;
  p.transcript = transcript;
  return PlayerView(std::move(p));
}

void check_protocol(const ProtocolHandle& protocol) {
  if (protocol.variant != Variant::Mpj) {
    throw PreconditionError("the adversary targets Boolean pointer jumping");
  }
  if (protocol.view == ViewKind::FullOneWay) {
    throw PreconditionError("the adversary needs a collapsing protocol");
  }
  if (protocol.n == 0 || protocol.n % 2 != 0) {
    throw PreconditionError("the adversary needs an even n, got n = " +
                            std::to_string(protocol.n));
  }
  if (!protocol.declared_max_bits) {
    throw PreconditionError("protocol '" + protocol.name + "' declares no message bound");
  }
  if (!within_message_bound(*protocol.declared_max_bits, protocol.n)) {
    throw PreconditionError("protocol '" + protocol.name + "' declares t = " +
                            std::to_string(*protocol.declared_max_bits) +
                            " bits, above n - (1/2)log2 n - 2 = " +
                            std::to_string(message_bound(protocol.n)));
  }
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (value >> (8 * byte)) & 0xFFU;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t hash_view(const PlayerView& v, std::uint64_t seed) {
  std::uint64_t h = fnv1a(0xCBF29CE484222325ULL, seed);
  h = fnv1a(h, v.player());
  if (v.start()) h = fnv1a(h, *v.start() + 1);
  for (const auto& f : v.prefix_layers()) {
    for (auto value : f.values()) h = fnv1a(h, value);
  }
  if (const auto* bits = std::get_if<BitVector>(&v.suffix())) {
    for (auto b : bits->bits()) h = fnv1a(h, b);
  }
  for (const auto& m : v.transcript()) {
    h = fnv1a(h, m.size());
    for (std::size_t b = 0; b < m.size(); ++b) h = fnv1a(h, m.bit(b));
  }
  return h;
}

bool hash_bit(std::uint64_t h, std::size_t b) { return (mix_seed(h, b / 64) >> (b % 64)) & 1U; }

ProtocolHandle family_handle(std::string name, std::size_t n, std::size_t k, std::size_t t) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  ProtocolHandle h;
  h.name = std::move(name);
  h.n = n;
  h.k = k;
  h.variant = Variant::Mpj;
  h.view = ViewKind::Collapsing;
  h.declared_max_bits = t;
  h.players.resize(k);
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Crossing pairs

IabSets iab_sets(const BitVector& x, const BitVector& y) {
  if (x.size() != y.size()) throw ValidationError("I_ab needs strings of equal length");
  IabSets out;
  for (std::size_t r = 0; r < x.size(); ++r) {
    out.sets[(x[r] ? 2 : 0) + (y[r] ? 1 : 0)].push_back(r);
  }
  return out;
}

bool is_crossing(const BitVector& x, const BitVector& y) {
  const IabSets s = iab_sets(x, y);
  return std::all_of(s.sets.begin(), s.sets.end(), [](const auto& set) { return !set.empty(); });
}

std::optional<CrossingPair> find_crossing_pair(std::span<const BitVector> cell) {
  // Two distinct half-weight strings that are not complements always cross.
  const BitVector* anchor = nullptr;
  for (const auto& s : cell) {
    if (2 * s.weight() != s.size()) continue;
    if (anchor == nullptr) {
      anchor = &s;
    } else if (s != *anchor && s != anchor->complement()) {
      return CrossingPair{*anchor, s};
    }
  }
  for (std::size_t a = 0; a < cell.size(); ++a) {
    for (std::size_t b = a + 1; b < cell.size(); ++b) {
      if (is_crossing(cell[a], cell[b])) return CrossingPair{cell[a], cell[b]};
    }
  }
  return std::nullopt;
}

std::vector<BitVector> half_weight_strings(std::size_t n) {
  if (n % 2 != 0 || n == 0 || n > 30) {
    throw std::invalid_argument("half-weight enumeration needs even n in [2, 30]");
  }
  std::vector<BitVector> out;
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << n); ++word) {
    if (static_cast<std::size_t>(std::popcount(word)) == n / 2) {
      out.push_back(BitVector::from_word(word, n));
    }
  }
  return out;
}

double message_bound(std::size_t n) {
  const double nn = static_cast<double>(n);
  return nn - 0.5 * std::log2(nn) - 2.0;
}

bool within_message_bound(std::size_t t, std::size_t n) {
  return static_cast<double>(t) <= message_bound(n);
}

CrossedCell find_crossed_cell(std::size_t n, const MessageFn& msg, std::size_t t_bound) {
  if (!within_message_bound(t_bound, n)) {
    throw PreconditionError("t = " + std::to_string(t_bound) +
                            " exceeds n - (1/2)log2 n - 2 = " + std::to_string(message_bound(n)));
  }
  std::map<Message, std::vector<BitVector>> cells;
  for (auto& s : half_weight_strings(n)) {
    Message m = msg(s);
    if (m.size() > t_bound) {
      throw PreconditionError("message of " + std::to_string(m.size()) +
                              " bits exceeds the bound t = " + std::to_string(t_bound));
    }
    cells[std::move(m)].push_back(std::move(s));
  }
  for (const auto& [value, members] : cells) {
    if (auto pair = find_crossing_pair(members)) {
      return CrossedCell{value, std::move(*pair), members.size()};
    }
  }
  throw AdversaryFailure("no crossed cell among " + std::to_string(cells.size()) +
                         " message values: counterexample to the counting bound");
}

// ---------------------------------------------------------------------------
// Fooling inputs

FoolingPair build_fooling_inputs(const ProtocolHandle& protocol) {
  check_protocol(protocol);
  const std::size_t n = protocol.n;
  const std::size_t k = protocol.k;
  const std::size_t t = *protocol.declared_max_bits;

  std::vector<LayerFunction> layers;  // f_2 .. f_j
  std::vector<Message> alphas;
  std::size_t start = 0;

  auto level_fn = [&](std::size_t player) -> MessageFn {
    return [&, player](const BitVector& suffix) {
      return protocol.players[player - 1](
          collapsing_view(n, k, player, start, layers, suffix, alphas));
    };
  };

  CrossedCell cell = find_crossed_cell(n, level_fn(1), t);
  BitVector x = cell.pair.x;
  BitVector x1 = cell.pair.y;
  start = iab_sets(x, x1).get(false, true).front();
  alphas.push_back(cell.value);

  for (std::size_t j = 2; j <= k - 1; ++j) {
    cell = find_crossed_cell(n, level_fn(j), t);
    const BitVector& y = cell.pair.x;
    const BitVector& y1 = cell.pair.y;

    // f_j sends every class I_ab(x, x') to min I_ab(y, y').
    const IabSets from = iab_sets(x, x1);
    const IabSets to = iab_sets(y, y1);
    std::vector<std::size_t> map(n);
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t r : from.sets[c]) map[r] = to.sets[c].front();
    }
    LayerFunction f(std::move(map));
    if (y.compose(f) != x || y1.compose(f) != x1) {
      throw AdversaryFailure("level " + std::to_string(j) + ": new pair does not factor the old");
    }
    layers.push_back(std::move(f));
    alphas.push_back(cell.value);
    x = y;
    x1 = y1;
  }

  FoolingPair out{MpjInstance{n, start, layers, x}, MpjInstance{n, start, layers, x1},
                  std::move(alphas)};
  if (eval_mpj(out.inst0) || !eval_mpj(out.inst1)) {
    throw AdversaryFailure("completed inputs do not have answers (0, 1)");
  }
  return out;
}

FoolingReport verify_fooling(const ProtocolHandle& protocol, const MpjInstance& inst0,
                             const MpjInstance& inst1) {
  FoolingReport report;
  try {
    check_protocol(protocol);
  } catch (const PreconditionError& e) {
    report.rejected = true;
    report.reason = e.what();
    return report;
  }
  report.degenerate = inst0 == inst1;
  report.differ_only_in_last_layer =
      inst0.n == inst1.n && inst0.i == inst1.i && inst0.middles == inst1.middles;

  const Transcript t0 = run(protocol, inst0);
  const Transcript t1 = run(protocol, inst1);
  report.prefix_equal = std::equal(t0.messages.begin(), t0.messages.end() - 1,
                                   t1.messages.begin(), t1.messages.end() - 1);
  report.outputs = {t0.output, t1.output};
  report.expected = {eval(inst0), eval(inst1)};
  for (std::size_t c = 0; c < 2; ++c) report.errors += report.outputs[c] != report.expected[c];
  return report;
}

// ---------------------------------------------------------------------------
// Protocol family

ProtocolHandle truncation_protocol(std::size_t n, std::size_t k, std::size_t t) {
  if (t > n) throw std::invalid_argument("truncation length exceeds n");
  ProtocolHandle h = family_handle("truncate" + std::to_string(t), n, k, t);
  for (std::size_t j = 1; j < k; ++j) {
    h.players[j - 1] = [t](const PlayerView& v) {
      Message m;
      m.append(v.suffix_bits());
      return m.slice(0, t);
    };
  }
  h.players[k - 1] = [t](const PlayerView& v) {
    const std::size_t pointer = *v.pointer();
    const bool bit = pointer < t && v.message(v.k() - 1).bit(pointer);
    return encode_output(Variant::Mpj, v.n(), bit ? 1 : 0);
  };
  return h;
}

ProtocolHandle parity_protocol(std::size_t n, std::size_t k, std::size_t t, std::uint64_t seed) {
  ProtocolHandle h = family_handle("parity" + std::to_string(t), n, k, t);
  for (std::size_t j = 1; j < k; ++j) {
    std::vector<std::vector<std::uint8_t>> masks(t, std::vector<std::uint8_t>(n));
    for (std::size_t b = 0; b < t; ++b) {
      for (std::size_t r = 0; r < n; ++r) {
        masks[b][r] = mix_seed(seed, (j * 64 + b) * 64 + r) & 1U;
      }
    }
    h.players[j - 1] = [masks](const PlayerView& v) {
      const BitVector& x = v.suffix_bits();
      Message m;
      for (const auto& mask : masks) {
        bool parity = false;
        for (std::size_t r = 0; r < x.size(); ++r) parity ^= mask[r] && x[r];
        m.push_back(parity);
      }
      return m;
    };
  }
  h.players[k - 1] = [](const PlayerView& v) {
    bool parity = (*v.pointer() & 1U) != 0;
    for (const auto& m : v.transcript()) {
      for (std::size_t b = 0; b < m.size(); ++b) parity ^= m.bit(b);
    }
    return encode_output(Variant::Mpj, v.n(), parity ? 1 : 0);
  };
  return h;
}

ProtocolHandle hash_protocol(std::size_t n, std::size_t k, std::size_t t, std::uint64_t seed) {
  ProtocolHandle h = family_handle("hash" + std::to_string(t), n, k, t);
  for (std::size_t j = 1; j < k; ++j) {
    h.players[j - 1] = [t, seed](const PlayerView& v) {
      const std::uint64_t digest = hash_view(v, seed);
      Message m;
      for (std::size_t b = 0; b < t; ++b) m.push_back(hash_bit(digest, b));
      return m;
    };
  }
  h.players[k - 1] = [seed](const PlayerView& v) {
    return encode_output(Variant::Mpj, v.n(), hash_bit(hash_view(v, seed), 0) ? 1 : 0);
  };
  return h;
}

ProtocolHandle full_suffix_protocol(std::size_t n, std::size_t k) {
  ProtocolHandle h = family_handle("full", n, k, n);
  for (std::size_t j = 1; j < k; ++j) {
    h.players[j - 1] = [](const PlayerView& v) {
      Message m;
      m.append(v.suffix_bits());
      return m;
    };
  }
  h.players[k - 1] = [](const PlayerView& v) {
    const bool bit = v.message(v.k() - 1).bit(*v.pointer());
    return encode_output(Variant::Mpj, v.n(), bit ? 1 : 0);
  };
  return h;
}

std::vector<ProtocolHandle> collapsing_family(std::size_t n, std::size_t k, std::size_t count,
                                              std::uint64_t seed) {
  const double bound = message_bound(n);
  if (bound < 0) throw std::invalid_argument("n too small for any message bound");
  const auto t_max = static_cast<std::size_t>(std::floor(bound));
  std::vector<ProtocolHandle> out;
  for (std::size_t v = 0; v < count; ++v) {
    const std::size_t t = v / 3 % (t_max + 1);
    const std::uint64_t s = mix_seed(seed, v);
    switch (v % 3) {
      case 0: out.push_back(truncation_protocol(n, k, t)); break;
      case 1: out.push_back(parity_protocol(n, k, t, s)); break;
      default: out.push_back(hash_protocol(n, k, t, s)); break;
    }
  }
  return out;
}

}  // namespace mpj
