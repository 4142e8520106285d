#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpj/bucketing.hpp"

#include <cmath>

using namespace mpj;

namespace {

// ceil(2^t r / n) on 1-based r.
std::size_t bucket_formula(std::size_t t, std::size_t n, std::size_t r1) {
  const std::uint64_t num = (std::uint64_t{1} << t) * r1;
  return static_cast<std::size_t>((num + n - 1) / n);
}

std::vector<bool> all_perm(std::size_t k) { return std::vector<bool>(k - 1, true); }

}  // namespace

TEST_CASE("iterated logarithm") {
  CHECK(iterated_log(16, 0) == doctest::Approx(16));
  CHECK(iterated_log(16, 1) == doctest::Approx(4));
  CHECK(iterated_log(16, 2) == doctest::Approx(2));
  CHECK(iterated_log(65536, 3) == doctest::Approx(2));
  CHECK(iterated_log(16, 10) == doctest::Approx(1));
  CHECK(iterated_log(1, 3) == doctest::Approx(1));
  CHECK_THROWS_AS(iterated_log(0.5, 1), std::domain_error);
}

TEST_CASE("bucketing scheme examples") {
  const BucketingScheme s(2, 8);
  CHECK(s.members(0) == std::vector<std::size_t>{0, 1});
  CHECK(s.members(1) == std::vector<std::size_t>{2, 3});
  CHECK(s.members(2) == std::vector<std::size_t>{4, 5});
  CHECK(s.members(3) == std::vector<std::size_t>{6, 7});

  const BucketingScheme five(1, 5);
  CHECK(five.members(0) == std::vector<std::size_t>{0, 1});
  CHECK(five.members(1) == std::vector<std::size_t>{2, 3, 4});

  const BucketingScheme fine(4, 10);
  for (std::size_t j = 0; j < fine.bucket_count(); ++j) CHECK(fine.members(j).size() <= 1);
  CHECK_THROWS_AS(s.index(8), std::out_of_range);
  CHECK_THROWS_AS(BucketingScheme(0, 8), std::invalid_argument);
}

TEST_CASE("bucket index, members and size law agree with the formula, n <= 64") {
  for (std::size_t n = 1; n <= 64; ++n) {
    for (std::size_t t = 1; t <= ceil_log2(n) + 1; ++t) {
      const BucketingScheme s(t, n);
      std::vector<std::size_t> seen;
      for (std::size_t j = 0; j < s.bucket_count(); ++j) {
        const auto members = s.members(j);
        REQUIRE(members.size() <= (n + s.bucket_count() - 1) / s.bucket_count());
        REQUIRE(members.size() <= s.max_bucket_size());
        for (auto r : members) {
          REQUIRE(bucket_formula(t, n, r + 1) == j + 1);
          REQUIRE(s.index(r) == j);
          seen.push_back(r);
        }
      }
      REQUIRE(seen.size() == n);
      for (std::size_t r = 0; r < n; ++r) REQUIRE(seen[r] == r);
    }
  }
}

TEST_CASE("bucket plans") {
  const BucketPlan p = make_bucket_plan(16, 3);
  CHECK(p.b == std::vector<std::size_t>{2, 4, 16});
  CHECK(p.last_active == 2);
  const BucketPlan q = make_bucket_plan(65536, 4);
  CHECK(q.b == std::vector<std::size_t>{2, 4, 16, 65536});
  const BucketPlan tiny = make_bucket_plan(4, 6);
  CHECK(tiny.b == std::vector<std::size_t>{1, 1, 1, 1, 2, 4});
  CHECK_THROWS_AS(make_bucket_plan(4, 2), std::invalid_argument);

  const BucketPlan dbl = make_doubling_plan(4, 10);
  CHECK(dbl.last_active == 2);
  CHECK(dbl.bits(1) == 1);
  CHECK(dbl.bits(2) == 2);
  const BucketPlan d16 = make_doubling_plan(16, 5);
  CHECK(d16.bits(1) == 1);
  CHECK(d16.bits(2) == 2);
  CHECK(d16.bits(3) == 4);
  CHECK(d16.last_active == 3);
}

TEST_CASE("identity layers") {
  const ProtocolHandle p = bucketing_protocol(4, 3);
  const MpjHatInstance inst{4, 2, {LayerFunction::identity(4), LayerFunction::identity(4)}, {}};
  CHECK(run(p, inst).output == 2);
}

TEST_CASE("exhaustive n = 4, k = 3") {
  const BucketPlan plan = make_bucket_plan(4, 3);
  InstanceEnumerator all(4, 3, Variant::MpjHat, all_perm(3), 10000);
  VerifyOptions opts;
  opts.on_run = [&](const Instance&, const Transcript& t) {
    REQUIRE(t.per_player_bits[0] == 4 * plan.bits(1));
  };
  const VerifyReport r = verify(bucketing_protocol(plan), all, opts);
  CHECK(r.checked == 2304);
  CHECK(r.ok());
}

TEST_CASE("seeded samples and exact per-player bits") {
  for (std::size_t k : {3, 4, 5, 6}) {
    const BucketPlan plan = make_bucket_plan(16, k);
    CHECK(plan.bits(1) == std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(iterated_log(16, k - 1)))));
    SampleStream s(16, k, Variant::MpjHat, all_perm(k), 99, 3000);
    VerifyOptions opts;
    opts.on_run = [&](const Instance& inst, const Transcript& t) {
      const auto& h = std::get<MpjHatInstance>(inst);
      const DerivedViews dv = derive_views(h);
      REQUIRE(t.per_player_bits[0] == 16 * plan.bits(1));
      for (std::size_t j = 2; j <= k - 1; ++j) {
        const Message& m = t.messages[j - 1];
        std::size_t size = 0;
        for (std::size_t s = 0; s < 16; ++s) size += m.bit(s);
        REQUIRE(size <= BucketingScheme(plan.bits(j - 1), 16).max_bucket_size());
        REQUIRE(t.per_player_bits[j - 1] == 16 + size * plan.bits(j));
        REQUIRE(t.per_player_bits[j - 1] >= 16);
        REQUIRE(m.bit(h.layer(j)(dv.pointer(j))));
      }
      REQUIRE(t.per_player_bits[k - 1] == 4);
    };
    REQUIRE(verify(bucketing_protocol(plan), s, opts).ok());
  }
}

TEST_CASE("doubling variant") {
  const ProtocolHandle p = bucketing_protocol_doubling(4, 10);
  SampleStream s(4, 10, Variant::MpjHat, all_perm(10), 5, 500);
  VerifyOptions opts;
  opts.on_run = [](const Instance&, const Transcript& t) {
    for (std::size_t j = 3; j <= 9; ++j) REQUIRE(t.per_player_bits[j - 1] == 0);
  };
  CHECK(verify(p, s, opts).ok());

  SampleStream big(16, 8, Variant::MpjHat, all_perm(8), 8, 10000);
  CHECK(verify(bucketing_protocol_doubling(16, 8), big).ok());

  std::vector<double> ratio;
  for (std::size_t n : {8, 16, 32}) {
    std::size_t star = 0;
    for (double v = static_cast<double>(n); v > 1.0; v = std::log2(v)) ++star;
    const std::size_t k = star + 2;
    SampleStream src(n, k, Variant::MpjHat, all_perm(k), 21, 1000);
    const VerifyReport r = verify(bucketing_protocol_doubling(n, k), src);
    REQUIRE(r.ok());
    ratio.push_back(static_cast<double>(r.worst_cost) / static_cast<double>(n));
  }
  for (double c : ratio) CHECK(c <= 8.0);
}

TEST_CASE("cost bound and message lengths") {
  const BucketPlan plan = make_bucket_plan(16, 4);
  CHECK(bucketing_message_bits(plan, 1, 0) == 16 * plan.bits(1));
  CHECK(bucketing_message_bits(plan, 2, 3) == 16 + 3 * plan.bits(2));
  std::size_t bound = 16 * plan.bits(1);
  for (std::size_t j = 2; j <= 3; ++j) {
    bound += 16 + BucketingScheme(plan.bits(j - 1), 16).max_bucket_size() * plan.bits(j);
  }
  CHECK(bucketing_cost_bound(plan) == bound);
}

TEST_CASE("non-permutation layers are rejected") {
  const ProtocolHandle p = bucketing_protocol(4, 3);
  const MpjHatInstance inst{4, 0, {LayerFunction::identity(4), LayerFunction::constant(4, 1)}, {}};
  CHECK_THROWS_AS(run(p, inst), PreconditionError);
}
