#include "mpj/bucketing.hpp"

#include <algorithm>
#include <cmath>

namespace mpj {

namespace {

using u128 = unsigned __int128;

Message indicator(const std::vector<std::size_t>& members, std::size_t n) {
  std::vector<std::uint8_t> bits(n, 0);
  for (auto s : members) bits[s] = 1;
  Message m;
  m.append(BitVector(std::move(bits)));
  return m;
}

std::vector<std::size_t> read_indicator(const Message& msg, std::size_t n) {
  std::vector<std::size_t> members;
  for (std::size_t s = 0; s < n; ++s) {
    if (msg.bit(s)) members.push_back(s);
  }
  return members;
}

std::size_t rank_in(const std::vector<std::size_t>& members, std::size_t v, std::size_t level) {
  auto it = std::lower_bound(members.begin(), members.end(), v);
  if (it == members.end() || *it != v) {
    throw ContractViolation("chain invariant broken: pointer " + std::to_string(v + 1) +
                            " is not in S_" + std::to_string(level));
  }
  return static_cast<std::size_t>(it - members.begin());
}

// Bucket index of the answer, as announced by player `speaker`, read at the
// position of vertex `v` (the pointer entering layer speaker+1).
std::size_t announced_bucket(const BucketPlan& plan, const Message& msg, std::size_t speaker,
                             std::size_t v) {
  const std::size_t width = plan.bits(speaker);
  if (speaker == 1) return static_cast<std::size_t>(msg.read_uint(v * width, width));
  const auto members = read_indicator(msg, plan.n);
  const std::size_t rank = rank_in(members, v, speaker);
  return static_cast<std::size_t>(msg.read_uint(plan.n + rank * width, width));
}

}  // namespace

double iterated_log(double n, std::size_t i) {
  if (n < 1.0) throw std::domain_error("iterated_log needs n >= 1");
  double v = n;
  for (std::size_t step = 0; step < i && v > 1.0; ++step) v = std::log2(v);
  return v;
}

// ---------------------------------------------------------------------------
// BucketingScheme

BucketingScheme::BucketingScheme(std::size_t t, std::size_t n) : t_(t), n_(n) {
  if (n == 0) throw std::invalid_argument("bucketing scheme needs n >= 1");
  if (t == 0 || t > 62) throw std::invalid_argument("bucketing scheme needs 1 <= t <= 62");
}

std::size_t BucketingScheme::max_bucket_size() const noexcept {
  const std::size_t count = bucket_count();
  return (n_ + count - 1) / count;
}

std::size_t BucketingScheme::index(std::size_t r) const {
  if (r >= n_) throw std::out_of_range("bucket_index: r outside [n]");
  // ceil(2^t (r+1) / n) - 1
  const u128 num = (u128{1} << t_) * (r + 1);
  return static_cast<std::size_t>((num + n_ - 1) / n_) - 1;
}

std::vector<std::size_t> BucketingScheme::members(std::size_t j) const {
  if (j >= bucket_count()) throw std::out_of_range("bucket index outside 2^t");
  const u128 count = u128{1} << t_;
  const auto lo = static_cast<std::size_t>(u128{j} * n_ / count);
  const auto hi = static_cast<std::size_t>(u128{j + 1} * n_ / count);
  std::vector<std::size_t> out;
  for (std::size_t r = lo; r < hi; ++r) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Plans

BucketPlan make_bucket_plan(std::size_t n, std::size_t k) {
  if (n < 2) throw std::invalid_argument("bucketing needs n >= 2");
  if (k < 3) throw std::invalid_argument("bucketing needs k >= 3");
  BucketPlan plan{n, k, false, std::vector<std::size_t>(k, 0), k - 1};
  for (std::size_t j = 1; j < k; ++j) {
    const double value = iterated_log(static_cast<double>(n), k - j);
    plan.b[j - 1] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value)));
  }
  plan.b[k - 1] = n;
  return plan;
}

BucketPlan make_doubling_plan(std::size_t n, std::size_t k) {
  BucketPlan plan = make_bucket_plan(n, k);
  plan.doubling = true;
  const std::size_t cap = ceil_log2(n);
  std::fill(plan.b.begin() + 1, plan.b.end() - 1, 0);
  for (std::size_t j = 1; j < k; ++j) {
    if (j > 1) {
      // The last speaker must reach singletons whatever the doubling reached.
      plan.b[j - 1] = (j == k - 1) ? cap : std::min(cap, 2 * plan.b[j - 2]);
    }
    plan.last_active = j;
    if (BucketingScheme(plan.b[j - 1], n).max_bucket_size() <= 1) break;
  }
  return plan;
}

std::size_t bucketing_message_bits(const BucketPlan& plan, std::size_t j, std::size_t s_size) {
  if (j == 1) return plan.n * plan.bits(1);
  if (j <= plan.last_active) return plan.n + s_size * plan.bits(j);
  return 0;
}

std::size_t bucketing_cost_bound(const BucketPlan& plan) {
  std::size_t total = bucketing_message_bits(plan, 1, 0);
  for (std::size_t j = 2; j <= plan.last_active; ++j) {
    const std::size_t s_max = BucketingScheme(plan.bits(j - 1), plan.n).max_bucket_size();
    total += bucketing_message_bits(plan, j, s_max);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Protocol

ProtocolHandle bucketing_protocol(const BucketPlan& plan) {
  const std::size_t n = plan.n;
  const std::size_t k = plan.k;

  ProtocolHandle h;
  h.name = plan.doubling ? "bucketing-doubling" : "bucketing";
  h.n = n;
  h.k = k;
  h.variant = Variant::MpjHat;
  h.view = ViewKind::Collapsing;
  h.players.resize(k);

  h.players[0] = [plan](const PlayerView& v) {
    const LayerFunction& fhat = v.suffix_map();
    const BucketingScheme fine(plan.bits(1), plan.n);
    Message msg;
    for (std::size_t r = 0; r < plan.n; ++r) msg.append_uint(fine.index(fhat(r)), fine.bits());
    return msg;
  };

  for (std::size_t j = 2; j <= k - 1; ++j) {
    if (j > plan.last_active) {
      h.players[j - 1] = [](const PlayerView&) { return Message{}; };
      continue;
    }
    h.players[j - 1] = [plan, j](const PlayerView& v) {
      const std::size_t pointer = *v.pointer();
      const LayerFunction& fhat = v.suffix_map();
      const std::size_t b = announced_bucket(plan, v.message(j - 1), j - 1, pointer);
      const BucketingScheme coarse(plan.bits(j - 1), plan.n);
      const BucketingScheme fine(plan.bits(j), plan.n);

      std::vector<std::size_t> s_j;
      for (std::size_t s = 0; s < plan.n; ++s) {
        if (coarse.index(fhat(s)) == b) s_j.push_back(s);
      }
      Message msg = indicator(s_j, plan.n);
      for (std::size_t s : s_j) msg.append_uint(fine.index(fhat(s)), fine.bits());
      return msg;
    };
  }

  h.players[k - 1] = [plan](const PlayerView& v) {
    const std::size_t last = plan.last_active;
    std::size_t pointer = *v.start();
    for (std::size_t layer = 2; layer <= last; ++layer) pointer = v.prefix_layer(layer)(pointer);
    const std::size_t b = announced_bucket(plan, v.message(last), last, pointer);
    const auto bucket = BucketingScheme(plan.bits(last), plan.n).members(b);
    if (bucket.size() != 1) {
      throw ContractViolation("final bucket has " + std::to_string(bucket.size()) +
                              " members, expected a singleton");
    }
    return encode_output(Variant::MpjHat, plan.n, bucket.front());
  };

  h.precondition = [](const Instance& inst) {
    const auto* hat = std::get_if<MpjHatInstance>(&inst);
    if (hat == nullptr) throw PreconditionError("bucketing runs on hat instances only");
    for (std::size_t layer = 2; layer <= hat->k(); ++layer) {
      if (!hat->layer(layer).is_permutation()) {
        throw PreconditionError("bucketing needs permutation layers; f_" +
                                std::to_string(layer) + " is not one");
      }
    }
  };

  h.audit = [plan](const Instance& inst, const Transcript& t) {
    const auto& hat = std::get<MpjHatInstance>(inst);
    const DerivedViews dv = derive_views(hat);
    if (t.per_player_bits[0] != bucketing_message_bits(plan, 1, 0)) {
      throw ContractViolation("bucketing: player 1 length differs from n*b_1");
    }
    for (std::size_t j = 2; j <= plan.k - 1; ++j) {
      if (j > plan.last_active) {
        if (t.per_player_bits[j - 1] != 0) throw ContractViolation("silent player spoke");
        continue;
      }
      const auto s_j = read_indicator(t.messages[j - 1], plan.n);
      rank_in(s_j, hat.layer(j)(dv.pointer(j)), j);
      const std::size_t bound = BucketingScheme(plan.bits(j - 1), plan.n).max_bucket_size();
      if (s_j.size() > bound) {
        throw ContractViolation("bucketing: |S_" + std::to_string(j) + "| exceeds " +
                                std::to_string(bound));
      }
      if (t.per_player_bits[j - 1] != bucketing_message_bits(plan, j, s_j.size())) {
        throw ContractViolation("bucketing: player " + std::to_string(j) +
                                " length differs from n + |S_j| b_j");
      }
    }
  };
  return h;
}

ProtocolHandle bucketing_protocol(std::size_t n, std::size_t k) {
  return bucketing_protocol(make_bucket_plan(n, k));
}

ProtocolHandle bucketing_protocol_doubling(std::size_t n, std::size_t k) {
  return bucketing_protocol(make_doubling_plan(n, k));
}

}  // namespace mpj
