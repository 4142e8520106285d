#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpj/core.hpp"

#include <set>

using namespace mpj;

namespace {

LayerFunction L(std::initializer_list<std::size_t> one_based) {
  return LayerFunction::from_one_based(one_based);
}

BitVector B(const char* s) { return BitVector::from_string(s); }

// Straight table lookups on 1-based vectors; shares no code with the library.
int oracle_bit(std::size_t i1, const std::vector<std::vector<std::size_t>>& middles,
               const std::string& x) {
  std::size_t p = i1;
  for (const auto& f : middles) p = f[p - 1];
  return x[p - 1] - '0';
}

std::vector<std::vector<std::size_t>> as_tables(const MpjInstance& inst) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& f : inst.middles) out.push_back(f.to_one_based());
  return out;
}

}  // namespace

TEST_CASE("layer functions") {
  CHECK(L({2, 3, 1}).is_permutation());
  CHECK_FALSE(L({1, 1, 2}).is_permutation());
  CHECK(L({2, 3, 1}).inverse() == L({3, 1, 2}));
  CHECK(L({1, 1, 2}).preimage(0) == std::vector<std::size_t>{0, 1});
  CHECK(L({1, 1, 2}).preimage_size(2) == 0);
  CHECK(compose(L({1, 1, 2}), L({2, 3, 1})) == L({1, 2, 1}));
  CHECK_THROWS_AS(L({0, 1}), ValidationError);
  CHECK_THROWS_AS(L({3, 1}), ValidationError);
  CHECK_THROWS_AS(L({1, 1}).inverse(), std::exception);
}

TEST_CASE("bit vectors") {
  const BitVector x = B("0110");
  CHECK(x.weight() == 2);
  CHECK(x.complement() == B("1001"));
  CHECK(x[1]);
  CHECK_FALSE(x[0]);
  CHECK(BitVector::from_word(0b0110, 4) == x);
  CHECK(x.compose(L({2, 1, 4, 3})) == B("1001"));
  CHECK_THROWS_AS(B("01x"), ValidationError);
  for (std::uint64_t w = 0; w < 64; ++w) {
    const BitVector v = BitVector::from_word(w, 6);
    CHECK(v.weight() + v.complement().weight() == 6);
  }
}

TEST_CASE("eval_mpj examples") {
  CHECK(eval_mpj(MpjInstance{4, 1, {LayerFunction::identity(4)}, B("0101")}) == true);
  CHECK(eval_mpj(MpjInstance{4, 0, {L({3, 1, 2, 4})}, B("0010")}) == true);
  const MpjInstance k4{3, 1, {L({2, 3, 1}), L({1, 1, 2})}, B("100")};
  const std::size_t hop1 = std::vector<std::size_t>{2, 3, 1}[2 - 1];
  const std::size_t hop2 = std::vector<std::size_t>{1, 1, 2}[hop1 - 1];
  CHECK(eval_mpj(k4) == (std::string("100")[hop2 - 1] == '1'));
  CHECK(eval_mpj(k4) == false);
}

TEST_CASE("eval_mpj_hat examples") {
  CHECK(eval_mpj_hat(MpjHatInstance{5, 3, {LayerFunction::identity(5), LayerFunction::identity(5)}, {}}) == 3);
  CHECK(eval_mpj_hat(MpjHatInstance{4, 0, {L({2, 3, 4, 1}), L({4, 3, 2, 1})}, {}}) == 2);
  CHECK(eval_mpj_hat(MpjHatInstance{4, 2, {L({1, 1, 1, 1})}, {}}) == 0);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(MpjInstance({4, 0, {LayerFunction::identity(3)}, B("0101")}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(MpjInstance({4, 4, {}, B("0101")}).validate(), ValidationError);
  CHECK_THROWS_AS(MpjInstance({4, 0, {}, B("010")}).validate(), ValidationError);
  CHECK_THROWS_AS(MpjHatInstance({3, 0, {L({1, 1, 2})}, {true}}).validate(), ValidationError);
  CHECK_NOTHROW(MpjHatInstance({3, 0, {L({1, 1, 2})}, {false}}).validate());
  CHECK_THROWS_AS(eval_mpj(MpjInstance{4, 0, {LayerFunction::identity(3)}, B("0101")}),
                  ValidationError);
}

TEST_CASE("derive_views examples") {
  const DerivedViews a = derive_views(MpjInstance{4, 2, {LayerFunction::identity(4)}, B("0110")});
  CHECK(a.pointer(3) == 2);
  const DerivedViews b = derive_views(MpjInstance{4, 0, {L({2, 1, 4, 3})}, B("0110")});
  CHECK(b.suffix_bits(1) == B("1001"));
  CHECK(b.suffix_bits(2) == B("0110"));
  const DerivedViews c = derive_views(
      MpjHatInstance{4, 0, {L({1, 2, 3, 4}), L({2, 2, 2, 2}), LayerFunction::identity(4)}, {}});
  CHECK(c.suffix_map(2) == L({2, 2, 2, 2}));
  CHECK(c.suffix_map(4) == LayerFunction::identity(4));
}

TEST_CASE("derive_views recurrences and composition consistency, exhaustive") {
  for (std::size_t n : {2, 3}) {
    for (std::size_t k : {2, 3, 4}) {
      InstanceEnumerator e(n, k, Variant::Mpj, {}, 1'000'000);
      std::uint64_t seen = 0;
      while (auto inst = e.next()) {
        const auto& m = std::get<MpjInstance>(*inst);
        const DerivedViews dv = derive_views(m);
        const int want = oracle_bit(m.i + 1, as_tables(m), m.x.to_string());
        REQUIRE(static_cast<int>(eval_mpj(m)) == want);
        REQUIRE(dv.pointer(2) == m.i);
        for (std::size_t j = 2; j < k; ++j) {
          REQUIRE(dv.pointer(j + 1) == m.layer(j)(dv.pointer(j)));
          REQUIRE(dv.suffix_bits(j - 1) == dv.suffix_bits(j).compose(m.layer(j)));
        }
        for (std::size_t j = 2; j < k; ++j) {
          REQUIRE(static_cast<int>(dv.suffix_bits(j)[m.layer(j)(dv.pointer(j))]) == want);
        }
        REQUIRE(static_cast<int>(dv.suffix_bits(1)[m.i]) == want);
        ++seen;
      }
      CHECK(seen == e.count());
    }
  }
}

TEST_CASE("hat views satisfy the suffix recurrence") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = std::get<MpjHatInstance>(sample_instance(5, 5, Variant::MpjHat, {}, seed));
    const DerivedViews dv = derive_views(inst);
    for (std::size_t j = 1; j < 5; ++j) {
      REQUIRE(dv.suffix_map(j) == compose(dv.suffix_map(j + 1), inst.layer(j + 1)));
    }
    REQUIRE(dv.suffix_map(1)(inst.i) == eval_mpj_hat(inst));
  }
}

TEST_CASE("embed_three") {
  const MpjInstance k3{4, 1, {L({3, 1, 2, 4})}, B("0110")};
  CHECK(embed_three(k3, 2) == k3);
  const MpjInstance k4{3, 2, {L({2, 3, 1}), L({1, 1, 2})}, B("100")};
  CHECK(embed_three(k4, 2) == MpjInstance{3, 2, {L({2, 3, 1})}, B("100").compose(L({1, 1, 2}))});
  CHECK_THROWS_AS(embed_three(k4, 1), std::out_of_range);
  CHECK_THROWS_AS(embed_three(k4, 4), std::out_of_range);

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto inst = std::get<MpjInstance>(sample_instance(6, 5, Variant::Mpj, {}, seed));
    for (std::size_t j = 2; j <= 4; ++j) REQUIRE(eval_mpj(embed_three(inst, j)) == eval_mpj(inst));
  }
  for (std::size_t n : {2, 3}) {
    InstanceEnumerator e(n, 4, Variant::Mpj, {}, 1'000'000);
    while (auto inst = e.next()) {
      const auto& m = std::get<MpjInstance>(*inst);
      for (std::size_t j = 2; j <= 3; ++j) REQUIRE(eval_mpj(embed_three(m, j)) == eval_mpj(m));
    }
  }
}

TEST_CASE("enumeration counts and order") {
  auto drain = [](InstanceEnumerator& e) {
    std::vector<Instance> all;
    while (auto inst = e.next()) all.push_back(*inst);
    return all;
  };
  InstanceEnumerator a(2, 3, Variant::Mpj, {}, 1000);
  CHECK(a.count() == 2 * 4 * 4);
  const auto all = drain(a);
  CHECK(all.size() == 32);
  std::set<std::string> keys;
  for (const auto& inst : all) {
    const auto& m = std::get<MpjInstance>(inst);
    keys.insert(std::to_string(m.i) + "|" + m.x.to_string() + "|" +
                std::to_string(m.middles[0](0)) + std::to_string(m.middles[0](1)));
  }
  CHECK(keys.size() == 32);

  InstanceEnumerator b(3, 2, Variant::Mpj, {}, 1000);
  CHECK(drain(b).size() == 24);

  InstanceEnumerator c(3, 3, Variant::MpjHat, {true, true}, 1000);
  const auto hats = drain(c);
  CHECK(hats.size() == 108);
  for (const auto& inst : hats) {
    for (const auto& f : std::get<MpjHatInstance>(inst).layers) REQUIRE(f.is_permutation());
  }
  CHECK(instance_count(4, 3, Variant::MpjHat, {true, true}) == 2304);
  CHECK(instance_count(3, 4, Variant::Mpj, {}) == 17496);
  CHECK_FALSE(instance_count(64, 8, Variant::Mpj, {}).has_value());

  try {
    InstanceEnumerator too_big(4, 4, Variant::Mpj, {}, 100);
    FAIL("expected a budget refusal");
  } catch (const BudgetExceeded& e) {
    CHECK(e.count() == std::optional<std::uint64_t>(4ULL * 256 * 256 * 16));
  }
}

TEST_CASE("sampling") {
  CHECK(sample_instance(6, 4, Variant::Mpj, {}, 7) == sample_instance(6, 4, Variant::Mpj, {}, 7));
  std::set<std::string> distinct;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = std::get<MpjInstance>(sample_instance(8, 4, Variant::Mpj, {}, seed));
    std::string key = std::to_string(m.i) + m.x.to_string();
    for (const auto& f : m.middles) {
      for (auto v : f.values()) key += std::to_string(v);
    }
    distinct.insert(key);
  }
  CHECK(distinct.size() == 100);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto h = std::get<MpjHatInstance>(
        sample_instance(7, 4, Variant::MpjHat, {true, true, true}, seed));
    for (const auto& f : h.layers) REQUIRE(f.is_permutation());
  }
  SampleStream s(5, 3, Variant::Mpj, {}, 3, 10);
  std::size_t produced = 0;
  while (s.next()) ++produced;
  CHECK(produced == 10);
}

TEST_CASE("ceil_log2") {
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(3) == 2);
  CHECK(ceil_log2(4) == 2);
  CHECK(ceil_log2(5) == 3);
  CHECK(ceil_log2(16) == 4);
}
