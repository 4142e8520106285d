#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpj/adversary.hpp"

#include <cmath>
#include <set>

using namespace mpj;

namespace {

BitVector B(const char* s) { return BitVector::from_string(s); }

std::vector<std::size_t> V(std::initializer_list<std::size_t> one_based) {
  std::vector<std::size_t> out;
  for (auto v : one_based) out.push_back(v - 1);
  return out;
}

MessageFn random_message(std::size_t t, std::uint64_t seed) {
  return [t, seed](const BitVector& x) {
    std::uint64_t word = 0;
    for (std::size_t r = 0; r < x.size(); ++r) word = word << 1 | (x[r] ? 1U : 0U);
    Message m;
    m.append_uint(mix_seed(seed, word) & ((std::uint64_t{1} << t) - 1), t);
    return m;
  };
}

ProtocolHandle silent(std::size_t n, std::size_t k) {
  ProtocolHandle h;
  h.name = "silent";
  h.n = n;
  h.k = k;
  h.view = ViewKind::Collapsing;
  h.declared_max_bits = 0;
  h.players.assign(k, [](const PlayerView&) { return Message{}; });
  h.players[k - 1] = [](const PlayerView&) { return Message::from_string("1"); };
  return h;
}

void check_pair(const ProtocolHandle& p) {
  const FoolingPair pair = build_fooling_inputs(p);
  REQUIRE(eval_mpj(pair.inst0) == false);
  REQUIRE(eval_mpj(pair.inst1) == true);
  REQUIRE(pair.inst0.i == pair.inst1.i);
  REQUIRE(pair.inst0.middles == pair.inst1.middles);
  const Transcript t0 = run(p, pair.inst0);
  const Transcript t1 = run(p, pair.inst1);
  for (std::size_t j = 0; j + 1 < p.k; ++j) {
    REQUIRE(t0.messages[j] == t1.messages[j]);
    REQUIRE(t0.messages[j] == pair.transcript_prefix[j]);
  }
  const FoolingReport r = verify_fooling(p, pair.inst0, pair.inst1);
  REQUIRE(r.fooled());
  REQUIRE(r.errors == 1);
}

}  // namespace

TEST_CASE("I_ab sets") {
  const IabSets s = iab_sets(B("0011"), B("0101"));
  CHECK(s.get(false, false) == V({1}));
  CHECK(s.get(false, true) == V({2}));
  CHECK(s.get(true, false) == V({3}));
  CHECK(s.get(true, true) == V({4}));
  CHECK(is_crossing(B("0011"), B("0101")));
  const IabSets same = iab_sets(B("0110"), B("0110"));
  CHECK(same.get(false, true).empty());
  CHECK(same.get(true, false).empty());
  CHECK_FALSE(is_crossing(B("0110"), B("0110")));
  CHECK_FALSE(is_crossing(B("0110"), B("1001")));
  CHECK_THROWS_AS(iab_sets(B("01"), B("011")), ValidationError);

  for (std::uint64_t a = 0; a < 32; ++a) {
    for (std::uint64_t b = 0; b < 32; ++b) {
      const IabSets p = iab_sets(BitVector::from_word(a, 5), BitVector::from_word(b, 5));
      std::size_t total = 0;
      for (const auto& set : p.sets) total += set.size();
      REQUIRE(total == 5);
    }
  }
}

TEST_CASE("crossing pairs in cells") {
  const std::vector<BitVector> cell = {B("0011"), B("0101")};
  const auto pair = find_crossing_pair(cell);
  REQUIRE(pair.has_value());
  CHECK(is_crossing(pair->x, pair->y));
  const std::vector<BitVector> complements = {B("0011"), B("1100")};
  CHECK_FALSE(find_crossing_pair(complements).has_value());
  const std::vector<BitVector> skewed = {B("0001"), B("0111")};
  CHECK_FALSE(find_crossing_pair(skewed).has_value());
  const std::vector<BitVector> fallback = {B("0001"), B("0110")};
  CHECK_FALSE(find_crossing_pair(fallback).has_value());
  const std::vector<BitVector> mixed = {B("0011"), B("0110"), B("1000")};
  CHECK(find_crossing_pair(mixed).has_value());
  CHECK_FALSE(find_crossing_pair(std::vector<BitVector>{B("1010"), B("0001"), B("1101")}).has_value());
  CHECK(find_crossing_pair(std::vector<BitVector>{B("00011"), B("01101")}).has_value());
}

TEST_CASE("half-weight pairs cross unless complementary, n = 4, 6, 8") {
  for (std::size_t n : {4, 6, 8}) {
    const auto hw = half_weight_strings(n);
    std::size_t binom = 1;
    for (std::size_t r = 1; r <= n / 2; ++r) binom = binom * (n / 2 + r) / r;
    REQUIRE(hw.size() == binom);
    for (std::size_t a = 0; a < hw.size(); ++a) {
      REQUIRE(hw[a].weight() == n / 2);
      if (a > 0) REQUIRE(hw[a - 1] < hw[a]);
      for (std::size_t b = 0; b < hw.size(); ++b) {
        if (a == b) continue;
        REQUIRE(is_crossing(hw[a], hw[b]) == (hw[b] != hw[a].complement()));
      }
    }
  }
}

TEST_CASE("central binomial coefficient beats 2^n / (2 sqrt n)") {
  for (std::size_t n = 4; n <= 64; n += 2) {
    long double c = 1;
    for (std::size_t r = 1; r <= n / 2; ++r) c = c * (n / 2 + r) / r;
    REQUIRE(c > std::pow(2.0L, n) / (2.0L * std::sqrt(static_cast<long double>(n))));
  }
}

TEST_CASE("message bound") {
  CHECK(message_bound(8) == doctest::Approx(4.5));
  CHECK(within_message_bound(4, 8));
  CHECK_FALSE(within_message_bound(5, 8));
  CHECK(within_message_bound(6, 10));
  CHECK_FALSE(within_message_bound(7, 10));
}

TEST_CASE("crossed cells") {
  const MessageFn constant = [](const BitVector&) { return Message{}; };
  const CrossedCell c = find_crossed_cell(4, constant, 0);
  CHECK(c.value.empty());
  CHECK(c.half_weight_members == 6);
  CHECK(c.pair.x == B("0011"));
  CHECK(c.pair.y == B("0101"));

  const MessageFn trunc = [](const BitVector& x) {
    Message m;
    m.append(x);
    return m.slice(0, 4);
  };
  const CrossedCell t = find_crossed_cell(8, trunc, 4);
  CHECK(is_crossing(t.pair.x, t.pair.y));
  for (std::size_t r = 0; r < 4; ++r) CHECK(t.pair.x[r] == t.pair.y[r]);
  CHECK(trunc(t.pair.x) == t.value);

  CHECK_THROWS_AS(find_crossed_cell(8, trunc, 5), PreconditionError);
  const MessageFn liar = [](const BitVector& x) {
    Message m;
    m.append(x);
    return m;
  };
  CHECK_THROWS_AS(find_crossed_cell(8, liar, 4), PreconditionError);
}

TEST_CASE("crossed cells exist for random message functions") {
  for (std::size_t n : {8, 10, 12}) {
    const auto t = static_cast<std::size_t>(std::floor(message_bound(n)));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const MessageFn msg = random_message(t, seed * 31 + n);
      const CrossedCell c = find_crossed_cell(n, msg, t);
      REQUIRE(is_crossing(c.pair.x, c.pair.y));
      REQUIRE(msg(c.pair.x) == c.value);
      REQUIRE(msg(c.pair.y) == c.value);
    }
  }
}

TEST_CASE("fooling pairs") {
  check_pair(truncation_protocol(8, 3, 4));
  check_pair(silent(8, 3));
  check_pair(silent(6, 5));
  check_pair(parity_protocol(8, 4, 4, 3));
  check_pair(hash_protocol(10, 4, 6, 9));

  const FoolingPair pair = build_fooling_inputs(truncation_protocol(8, 3, 4));
  const FoolingReport r = verify_fooling(truncation_protocol(8, 3, 4), pair.inst0, pair.inst1);
  CHECK(r.prefix_equal);
  CHECK(r.errors == 1);
  CHECK(r.differ_only_in_last_layer);
}

TEST_CASE("class preservation through the levels") {
  // Rebuild the chain of suffixes from the final pair: x = y∘f for each level.
  const ProtocolHandle p = hash_protocol(8, 5, 4, 77);
  const FoolingPair pair = build_fooling_inputs(p);
  BitVector y0 = pair.inst0.x;
  BitVector y1 = pair.inst1.x;
  for (std::size_t h = pair.inst0.k() - 1; h >= 2; --h) {
    y0 = y0.compose(pair.inst0.layer(h));
    y1 = y1.compose(pair.inst1.layer(h));
    REQUIRE(is_crossing(y0, y1));
  }
  CHECK(y0[pair.inst0.i] == false);
  CHECK(y1[pair.inst0.i] == true);
}

TEST_CASE("family attacks") {
  std::size_t attacked = 0;
  for (std::size_t n : {8, 10}) {
    for (std::size_t k : {3, 4}) {
      for (const auto& p : collapsing_family(n, k, 15, n * 100 + k)) {
        check_pair(p);
        ++attacked;
      }
    }
  }
  CHECK(attacked == 60);
}

TEST_CASE("refusals and degenerate reports") {
  CHECK_THROWS_AS(build_fooling_inputs(full_suffix_protocol(8, 3)), PreconditionError);
  CHECK_THROWS_AS(build_fooling_inputs(truncation_protocol(7, 3, 2)), PreconditionError);
  ProtocolHandle unbounded = truncation_protocol(8, 3, 4);
  unbounded.declared_max_bits.reset();
  CHECK_THROWS_AS(build_fooling_inputs(unbounded), PreconditionError);

  const FoolingReport full = verify_fooling(full_suffix_protocol(8, 3),
                                            MpjInstance{8, 0, {LayerFunction::identity(8)}, B("01010101")},
                                            MpjInstance{8, 0, {LayerFunction::identity(8)}, B("11010101")});
  CHECK(full.rejected);
  CHECK_FALSE(full.fooled());

  const MpjInstance same{8, 0, {LayerFunction::identity(8)}, B("01010101")};
  const FoolingReport degenerate = verify_fooling(truncation_protocol(8, 3, 4), same, same);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.prefix_equal);
  CHECK(degenerate.errors <= 2);
  CHECK_FALSE(degenerate.fooled());

  const ProtocolHandle full_p = full_suffix_protocol(8, 3);
  SampleStream s(8, 3, Variant::Mpj, {}, 4, 500);
  CHECK(verify(full_p, s).ok());
}
