#include "mpj/jump_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpj {

namespace {

Message checked_part(Message msg, std::size_t m, const char* who) {
  if (msg.size() != m) {
    throw ContractViolation(std::string(who) + " produced " + std::to_string(msg.size()) +
                            " bits, expected m = " + std::to_string(m));
  }
  return msg;
}

std::size_t first_hit(const CoverSet& cover, std::size_t r, std::size_t target) {
  for (std::size_t ell = 0; ell < cover.perms.size(); ++ell) {
    if (cover.perms[ell](r) == target) return ell;
  }
  throw ContractViolation("cover has no permutation sending " + std::to_string(r + 1) + " to " +
                          std::to_string(target + 1));
}

void require_d(std::size_t d) {
  if (d == 0) throw std::invalid_argument("d must be at least 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// Black-box permutation protocol

PermProtocol3 naive_perm_protocol(std::size_t n) {
  PermProtocol3 p;
  p.name = "naive";
  p.n = n;
  p.m = n;
  p.alpha = [](const LayerFunction&, const BitVector& x) {
    Message m;
    m.append(x);
    return m;
  };
  p.beta = [n](std::size_t, const BitVector&, const Message&) {
    Message m;
    for (std::size_t b = 0; b < n; ++b) m.push_back(false);
    return m;
  };
  p.gamma = [](std::size_t i, const LayerFunction& pi, const Message& alpha, const Message&) {
    return alpha.bit(pi(i));
  };
  return p;
}

PermProtocolCheck check_perm_protocol(const PermProtocol3& p) {
  PermProtocolCheck out;
  const std::size_t n = p.n;
  if (n >= 20) throw std::invalid_argument("exhaustive contract check is limited to n < 20");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    const LayerFunction pi(perm);
    for (std::uint64_t word = 0; word < (std::uint64_t{1} << n); ++word) {
      const BitVector x = BitVector::from_word(word, n);
      const Message a = checked_part(p.alpha(pi, x), p.m, "alpha");
      for (std::size_t i = 0; i < n; ++i) {
        const Message b = checked_part(p.beta(i, x, a), p.m, "beta");
        ++out.checked;
        if (p.gamma(i, pi, a, b) != x[pi(i)]) ++out.failures;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// ---------------------------------------------------------------------------
// INDEX

ProtocolHandle index_protocol(std::size_t n) {
  ProtocolHandle h;
  h.name = "index";
  h.n = n;
  h.k = 2;
  h.variant = Variant::Mpj;
  h.view = ViewKind::FullOneWay;
  h.players = {
      [](const PlayerView& v) {
        Message m;
        m.append(v.suffix_bits());
        return m;
      },
      [](const PlayerView& v) {
        return encode_output(Variant::Mpj, v.n(), v.message(1).bit(*v.pointer()) ? 1 : 0);
      },
  };
  return h;
}

// ---------------------------------------------------------------------------
// 3 players

ProtocolHandle mpj3_sublinear(const PermProtocol3& p, std::size_t d) {
  require_d(d);
  const std::size_t n = p.n;
  const std::size_t m = p.m;

  ProtocolHandle h;
  h.name = "mpj3-sublinear";
  h.n = n;
  h.k = 3;
  h.variant = Variant::Mpj;
  h.view = ViewKind::FullOneWay;

  // PLR_1 sees f and x: alpha for each cover permutation, then x_s on heavy fibers.
  auto speaker1 = [p, d, n, m](const PlayerView& v) {
    const LayerFunction& f = v.ahead_layer(2);
    const BitVector& x = *v.tail();
    Message msg;
    for (const auto& pi : build_d_cover(f, d).perms) msg.append(checked_part(p.alpha(pi, x), m, "alpha"));
    for (std::size_t s = 0; s < n; ++s) {
      if (f.preimage_size(s) > d) msg.push_back(x[s]);
    }
    return msg;
  };

  // PLR_2 sees i and x: beta for every alpha in part 1.
  auto speaker2 = [p, d, m](const PlayerView& v) {
    const std::size_t i = *v.pointer();
    const BitVector& x = v.suffix_bits();
    const Message& first = v.message(1);
    Message msg;
    for (std::size_t ell = 0; ell < d; ++ell) {
      msg.append(checked_part(p.beta(i, x, first.slice(ell * m, m)), m, "beta"));
    }
    return msg;
  };

  // PLR_3 sees i and f.
  auto speaker3 = [p, d, n, m](const PlayerView& v) {
    const std::size_t i = *v.start();
    const LayerFunction& f = v.prefix_layer(2);
    const std::size_t target = f(i);
    const Message& first = v.message(1);
    bool answer = false;
    if (f.preimage_size(target) > d) {
      std::size_t rank = 0;
      for (std::size_t s = 0; s < target; ++s) rank += f.preimage_size(s) > d ? 1 : 0;
      answer = first.bit(d * m + rank);
    } else {
      const CoverSet cover = build_d_cover(f, d);
      const std::size_t ell = first_hit(cover, i, target);
      answer = p.gamma(i, cover.perms[ell], first.slice(ell * m, m), v.message(2).slice(ell * m, m));
    }
    return encode_output(Variant::Mpj, n, answer ? 1 : 0);
  };

  h.players = {speaker1, speaker2, speaker3};

  h.audit = [d, m](const Instance& inst, const Transcript& t) {
    const auto& f = std::get<MpjInstance>(inst).layer(2);
    std::size_t heavy = 0;
    for (std::size_t s = 0; s < f.size(); ++s) heavy += f.preimage_size(s) > d ? 1 : 0;
    if (t.per_player_bits[0] != d * m + heavy || t.per_player_bits[1] != d * m) {
      throw ContractViolation("mpj3-sublinear message lengths differ from d*m + heavy, d*m");
    }
  };
  return h;
}

// ---------------------------------------------------------------------------
// k players

bool SjChain::contains(std::size_t j, std::size_t s) const {
  const auto& set_j = set(j);
  return std::binary_search(set_j.begin(), set_j.end(), s);
}

std::size_t SjChain::rank(std::size_t j, std::size_t s) const {
  const auto& set_j = set(j);
  auto it = std::lower_bound(set_j.begin(), set_j.end(), s);
  if (it == set_j.end() || *it != s) {
    throw ContractViolation("vertex " + std::to_string(s + 1) + " is not in S_" +
                            std::to_string(j));
  }
  return static_cast<std::size_t>(it - set_j.begin());
}

SjChain build_sj_chain(std::span<const LayerFunction> middles, std::size_t n, std::size_t d) {
  require_d(d);
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  sets.push_back(std::move(all));
  for (const auto& f : middles) {
    std::vector<std::size_t> hits(n, 0);
    for (std::size_t r : sets.back()) ++hits[f(r)];
    std::vector<std::size_t> next;
    for (std::size_t s = 0; s < n; ++s) {
      if (hits[s] > d) next.push_back(s);
    }
    sets.push_back(std::move(next));
  }
  return SjChain(std::move(sets));
}

ProtocolHandle mpjk_sublinear(const PermProtocol3& p, std::size_t d, std::size_t k) {
  require_d(d);
  if (k < 3) throw std::invalid_argument("mpjk-sublinear needs k >= 3");
  const std::size_t n = p.n;
  const std::size_t m = p.m;
  const std::size_t part = d * m;

  ProtocolHandle h;
  h.name = "mpjk-sublinear";
  h.n = n;
  h.k = k;
  h.variant = Variant::Mpj;
  h.view = ViewKind::FullOneWay;
  h.players.resize(k);

  // PLR_1 sees f_2..f_{k-1} and x.
  h.players[0] = [p, d, n, m, k](const PlayerView& v) {
    const auto middles = v.ahead_layers();
    const BitVector& x = *v.tail();
    const SjChain chain = build_sj_chain(middles, n, d);

    // xhat[j] = x̂_j for j = 2..k-1.
    std::vector<BitVector> xhat(k);
    xhat[k - 1] = x;
    for (std::size_t j = k - 2; j >= 2; --j) xhat[j] = xhat[j + 1].compose(middles[j - 1]);

    Message msg;
    for (std::size_t j = 1; j <= k - 2; ++j) {
      const CoverSet cover = build_sd_cover(middles[j - 1], chain.set(j), d);
      for (const auto& pi : cover.perms) {
        msg.append(checked_part(p.alpha(pi, xhat[j + 1]), m, "alpha"));
      }
    }
    for (std::size_t s : chain.set(k - 1)) msg.push_back(x[s]);
    return msg;
  };

  // PLR_j, 2 <= j <= k-1, uses only î_j and x̂_j.
  for (std::size_t j = 2; j <= k - 1; ++j) {
    h.players[j - 1] = [p, d, m, part, j](const PlayerView& v) {
      const std::size_t pointer = *v.pointer();
      const BitVector& xhat = v.suffix_bits();
      const Message& first = v.message(1);
      Message msg;
      for (std::size_t ell = 0; ell < d; ++ell) {
        const Message a = first.slice((j - 2) * part + ell * m, m);
        msg.append(checked_part(p.beta(pointer, xhat, a), m, "beta"));
      }
      return msg;
    };
  }

  // PLR_k sees i and f_2..f_{k-1}; resolves at the first level whose fiber
  // inside S_j is small, else reads x_{î_k} from the final part.
  h.players[k - 1] = [p, d, n, m, part, k](const PlayerView& v) {
    const auto middles = v.prefix_layers();
    const SjChain chain = build_sj_chain(middles, n, d);
    const Message& first = v.message(1);
    std::size_t pointer = *v.start();
    for (std::size_t j = 1; j <= k - 2; ++j) {
      if (!chain.contains(j, pointer)) {
        throw ContractViolation("pointer î_" + std::to_string(j + 1) + " left S_" +
                                std::to_string(j));
      }
      const LayerFunction& f = middles[j - 1];
      const std::size_t target = f(pointer);
      std::size_t fiber = 0;
      for (std::size_t r : chain.set(j)) fiber += f(r) == target ? 1 : 0;
      if (fiber <= d) {
        const CoverSet cover = build_sd_cover(f, chain.set(j), d);
        const std::size_t ell = first_hit(cover, pointer, target);
        const Message a = first.slice((j - 1) * part + ell * m, m);
        const Message b = v.message(j + 1).slice(ell * m, m);
        return encode_output(Variant::Mpj, n, p.gamma(pointer, cover.perms[ell], a, b) ? 1 : 0);
      }
      pointer = target;
    }
    const std::size_t rank = chain.rank(k - 1, pointer);
    return encode_output(Variant::Mpj, n, first.bit((k - 2) * part + rank) ? 1 : 0);
  };

  h.audit = [d, n, part, k](const Instance& inst, const Transcript& t) {
    const auto& b = std::get<MpjInstance>(inst);
    const SjChain chain = build_sj_chain(b.middles, n, d);
    if (t.per_player_bits[0] != (k - 2) * part + chain.set(k - 1).size()) {
      throw ContractViolation("mpjk-sublinear: player 1 length differs from (k-2)dm + |S_{k-1}|");
    }
    for (std::size_t j = 2; j <= k - 1; ++j) {
      if (t.per_player_bits[j - 1] != part) {
        throw ContractViolation("mpjk-sublinear: player " + std::to_string(j) +
                                " length differs from d*m");
      }
    }
  };
  return h;
}

std::size_t choose_d(std::size_t k, double phi) {
  if (k < 3) throw std::invalid_argument("choose_d needs k >= 3");
  if (!(phi > 0.0) || phi > 1.0) throw std::domain_error("phi must lie in (0, 1]");
  const double base = static_cast<double>(k - 2) * phi;
  const double value = 1.0 / std::pow(base, 1.0 / static_cast<double>(k - 1));
  // Absorb rounding noise so exact integers are not pushed up by one.
  return static_cast<std::size_t>(std::max(1.0, std::ceil(value - 1e-9)));
}

}  // namespace mpj
