#include "mpj/core.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mpj {

namespace {

void require_width(const LayerFunction& f, std::size_t n, const char* what) {
  if (f.size() != n) {
    throw ValidationError(std::string(what) + ": layer width " + std::to_string(f.size()) +
                          " does not match n = " + std::to_string(n));
  }
}

bool checked_mul(std::uint64_t& acc, std::uint64_t factor) {
  if (factor != 0 && acc > UINT64_MAX / factor) return false;
  acc *= factor;
  return true;
}

std::size_t layer_count(std::size_t k, Variant variant) {
  return variant == Variant::Mpj ? k - 2 : k - 1;
}

void check_shape(std::size_t n, std::size_t k, Variant variant, const std::vector<bool>& mask) {
  if (n == 0) throw ValidationError("n must be positive");
  if (k < 2) throw ValidationError("k must be at least 2");
  if (!mask.empty() && mask.size() != layer_count(k, variant)) {
    throw ValidationError("perm_mask needs one flag per layer (" +
                          std::to_string(layer_count(k, variant)) + "), got " +
                          std::to_string(mask.size()));
  }
}

bool masked(const std::vector<bool>& mask, std::size_t layer) {
  return !mask.empty() && mask[layer];
}

}  // namespace

// ---------------------------------------------------------------------------
// LayerFunction

LayerFunction::LayerFunction(std::vector<std::size_t> map) : map_(std::move(map)) {
  if (map_.empty()) throw ValidationError("layer must have positive width");
  for (std::size_t v : map_) {
    if (v >= map_.size()) {
      throw ValidationError("layer value " + std::to_string(v + 1) + " outside [" +
                            std::to_string(map_.size()) + "]");
    }
  }
}

LayerFunction LayerFunction::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  std::iota(map.begin(), map.end(), std::size_t{0});
  return LayerFunction(std::move(map));
}

LayerFunction LayerFunction::constant(std::size_t n, std::size_t value) {
  return LayerFunction(std::vector<std::size_t>(n, value));
}

LayerFunction LayerFunction::from_one_based(std::span<const std::size_t> values) {
  std::vector<std::size_t> map;
  map.reserve(values.size());
  for (std::size_t v : values) {
    if (v == 0) throw ValidationError("1-based layer value 0");
    map.push_back(v - 1);
  }
  return LayerFunction(std::move(map));
}

LayerFunction LayerFunction::from_one_based(std::initializer_list<std::size_t> values) {
  return from_one_based(std::span<const std::size_t>(values.begin(), values.size()));
}

std::vector<std::size_t> LayerFunction::to_one_based() const {
  std::vector<std::size_t> out(map_);
  for (auto& v : out) ++v;
  return out;
}

bool LayerFunction::is_permutation() const {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

LayerFunction LayerFunction::inverse() const {
  if (!is_permutation()) throw ValidationError("inverse of a non-permutation");
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t r = 0; r < map_.size(); ++r) inv[map_[r]] = r;
  return LayerFunction(std::move(inv));
}

std::vector<std::size_t> LayerFunction::preimage(std::size_t s) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < map_.size(); ++r) {
    if (map_[r] == s) out.push_back(r);
  }
  return out;
}

std::size_t LayerFunction::preimage_size(std::size_t s) const {
  return static_cast<std::size_t>(std::count(map_.begin(), map_.end(), s));
}

LayerFunction compose(const LayerFunction& outer, const LayerFunction& inner) {
  require_width(inner, outer.size(), "compose");
  std::vector<std::size_t> map(inner.size());
  for (std::size_t r = 0; r < inner.size(); ++r) map[r] = outer(inner(r));
  return LayerFunction(std::move(map));
}

// ---------------------------------------------------------------------------
// BitVector

BitVector::BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw ValidationError("bit value outside {0,1}");
  }
}

BitVector BitVector::zeros(std::size_t n) { return BitVector(std::vector<std::uint8_t>(n, 0)); }

BitVector BitVector::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ValidationError("bit string may only contain '0' and '1'");
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitVector(std::move(bits));
}

BitVector BitVector::from_word(std::uint64_t word, std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t r = 0; r < n; ++r) bits[r] = (word >> (n - 1 - r)) & 1U;
  return BitVector(std::move(bits));
}

std::size_t BitVector::weight() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BitVector BitVector::complement() const {
  std::vector<std::uint8_t> out(bits_.size());
  for (std::size_t r = 0; r < bits_.size(); ++r) out[r] = bits_[r] ^ 1U;
  return BitVector(std::move(out));
}

BitVector BitVector::compose(const LayerFunction& f) const {
  require_width(f, bits_.size(), "x ∘ f");
  std::vector<std::uint8_t> out(f.size());
  for (std::size_t r = 0; r < f.size(); ++r) out[r] = bits_[f(r)];
  return BitVector(std::move(out));
}

std::string BitVector::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------------------
// Instances

std::string_view to_string(Variant v) { return v == Variant::Mpj ? "mpj" : "mpjhat"; }

void MpjInstance::validate() const {
  if (n == 0) throw ValidationError("n must be positive");
  if (i >= n) throw ValidationError("start vertex outside [n]");
  for (const auto& f : middles) require_width(f, n, "mpj");
  if (x.size() != n) throw ValidationError("x must have n bits");
}

void MpjHatInstance::validate() const {
  if (n == 0) throw ValidationError("n must be positive");
  if (i >= n) throw ValidationError("start vertex outside [n]");
  if (layers.empty()) throw ValidationError("mpjhat needs k >= 2");
  for (const auto& f : layers) require_width(f, n, "mpjhat");
  if (!perm_mask.empty()) {
    if (perm_mask.size() != layers.size()) {
      throw ValidationError("perm_mask needs one flag per layer");
    }
    for (std::size_t h = 0; h < layers.size(); ++h) {
      if (perm_mask[h] && !layers[h].is_permutation()) {
        throw ValidationError("layer f_" + std::to_string(h + 2) +
                              " is flagged as a permutation but is not one");
      }
    }
  }
}

Variant variant_of(const Instance& inst) {
  return std::holds_alternative<MpjInstance>(inst) ? Variant::Mpj : Variant::MpjHat;
}

std::size_t width_of(const Instance& inst) {
  return std::visit([](const auto& v) { return v.n; }, inst);
}

std::size_t players_of(const Instance& inst) {
  return std::visit([](const auto& v) { return v.k(); }, inst);
}

void validate(const Instance& inst) {
  std::visit([](const auto& v) { v.validate(); }, inst);
}

bool eval_mpj(const MpjInstance& inst) {
  inst.validate();
  std::size_t v = inst.i;
  for (const auto& f : inst.middles) v = f(v);
  return inst.x[v];
}

std::size_t eval_mpj_hat(const MpjHatInstance& inst) {
  inst.validate();
  std::size_t v = inst.i;
  for (const auto& f : inst.layers) v = f(v);
  return v;
}

std::size_t eval(const Instance& inst) {
  if (const auto* b = std::get_if<MpjInstance>(&inst)) return eval_mpj(*b) ? 1 : 0;
  return eval_mpj_hat(std::get<MpjHatInstance>(inst));
}

// ---------------------------------------------------------------------------
// DerivedViews

std::size_t DerivedViews::pointer(std::size_t j) const {
  if (j < 2 || j > k_) throw std::out_of_range("pointer index outside 2..k");
  return ihat_[j - 2];
}

const BitVector& DerivedViews::suffix_bits(std::size_t j) const {
  if (xhat_.empty()) throw std::logic_error("suffix_bits on a hat instance");
  if (j < 1 || j > k_ - 1) throw std::out_of_range("suffix index outside 1..k-1");
  return xhat_[j - 1];
}

const LayerFunction& DerivedViews::suffix_map(std::size_t j) const {
  if (fhat_.empty()) throw std::logic_error("suffix_map on a Boolean instance");
  if (j < 1 || j > k_) throw std::out_of_range("suffix index outside 1..k");
  return fhat_[j - 1];
}

DerivedViews derive_views(const MpjInstance& inst) {
  inst.validate();
  const std::size_t k = inst.k();
  DerivedViews dv;
  dv.k_ = k;
  dv.ihat_.resize(k - 1);
  dv.ihat_[0] = inst.i;
  for (std::size_t j = 2; j < k; ++j) dv.ihat_[j - 1] = inst.layer(j)(dv.ihat_[j - 2]);

  dv.xhat_.resize(k - 1);
  dv.xhat_[k - 2] = inst.x;
  for (std::size_t j = k - 2; j >= 1; --j) {
    dv.xhat_[j - 1] = dv.xhat_[j].compose(inst.layer(j + 1));
  }
  return dv;
}

DerivedViews derive_views(const MpjHatInstance& inst) {
  inst.validate();
  const std::size_t k = inst.k();
  DerivedViews dv;
  dv.k_ = k;
  dv.ihat_.resize(k - 1);
  dv.ihat_[0] = inst.i;
  for (std::size_t j = 3; j <= k; ++j) dv.ihat_[j - 2] = inst.layer(j - 1)(dv.ihat_[j - 3]);

  dv.fhat_.resize(k);
  dv.fhat_[k - 1] = LayerFunction::identity(inst.n);
  for (std::size_t j = k - 1; j >= 1; --j) {
    dv.fhat_[j - 1] = compose(dv.fhat_[j], inst.layer(j + 1));
  }
  return dv;
}

MpjInstance embed_three(const MpjInstance& inst, std::size_t j) {
  if (j <= 1 || j >= inst.k()) {
    throw std::out_of_range("embed_three needs 1 < j < k, got j = " + std::to_string(j));
  }
  const DerivedViews dv = derive_views(inst);
  return MpjInstance{inst.n, dv.pointer(j), {inst.layer(j)}, dv.suffix_bits(j)};
}

// ---------------------------------------------------------------------------
// Enumeration

BudgetExceeded::BudgetExceeded(std::optional<std::uint64_t> count, std::uint64_t budget)
    : std::runtime_error("exhaustive enumeration refused: " +
                         (count ? std::to_string(*count) : std::string(">= 2^64")) +
                         " instances exceed the budget of " + std::to_string(budget)),
      count_(count) {}

std::optional<std::uint64_t> instance_count(std::size_t n, std::size_t k, Variant variant,
                                            const std::vector<bool>& perm_mask) {
  check_shape(n, k, variant, perm_mask);
  std::uint64_t total = n;
  std::uint64_t n_pow_n = 1;
  std::uint64_t n_fact = 1;
  bool pow_ok = true;
  bool fact_ok = true;
  for (std::size_t r = 0; r < n; ++r) pow_ok = pow_ok && checked_mul(n_pow_n, n);
  for (std::size_t r = 2; r <= n; ++r) fact_ok = fact_ok && checked_mul(n_fact, r);

  for (std::size_t h = 0; h < layer_count(k, variant); ++h) {
    const bool perm = masked(perm_mask, h);
    if (perm ? !fact_ok : !pow_ok) return std::nullopt;
    if (!checked_mul(total, perm ? n_fact : n_pow_n)) return std::nullopt;
  }
  if (variant == Variant::Mpj) {
    if (n >= 64) return std::nullopt;
    if (!checked_mul(total, std::uint64_t{1} << n)) return std::nullopt;
  }
  return total;
}

InstanceEnumerator::InstanceEnumerator(std::size_t n, std::size_t k, Variant variant,
                                       std::vector<bool> perm_mask, std::uint64_t budget)
    : n_(n), k_(k), variant_(variant), perm_mask_(std::move(perm_mask)) {
  const auto count = instance_count(n, k, variant, perm_mask_);
  if (!count || *count > budget) throw BudgetExceeded(count, budget);
  count_ = *count;

  const std::size_t layers = layer_count(k, variant);
  layers_.resize(layers);
  for (std::size_t h = 0; h < layers; ++h) {
    layers_[h].assign(n, 0);
    if (masked(perm_mask_, h)) std::iota(layers_[h].begin(), layers_[h].end(), std::size_t{0});
  }
  if (variant == Variant::Mpj) x_.assign(n, 0);
}

Instance InstanceEnumerator::current() const {
  std::vector<LayerFunction> fs;
  fs.reserve(layers_.size());
  for (const auto& map : layers_) fs.emplace_back(map);
  if (variant_ == Variant::Mpj) {
    return MpjInstance{n_, i_, std::move(fs), BitVector(x_)};
  }
  return MpjHatInstance{n_, i_, std::move(fs), perm_mask_};
}

bool InstanceEnumerator::advance() {
  // Odometer: x is the fastest digit, then the last layer, ..., then i.
  for (std::size_t r = x_.size(); r-- > 0;) {
    if (x_[r] == 0) {
      x_[r] = 1;
      return true;
    }
    x_[r] = 0;
  }
  for (std::size_t h = layers_.size(); h-- > 0;) {
    auto& map = layers_[h];
    if (masked(perm_mask_, h)) {
      if (std::next_permutation(map.begin(), map.end())) return true;
      continue;  // wrapped back to the identity
    }
    for (std::size_t r = n_; r-- > 0;) {
      if (++map[r] < n_) return true;
      map[r] = 0;
    }
  }
  return ++i_ < n_;
}

std::optional<Instance> InstanceEnumerator::next() {
  if (done_) return std::nullopt;
  Instance out = current();
  done_ = !advance();
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Instance sample_instance(std::size_t n, std::size_t k, Variant variant,
                         const std::vector<bool>& perm_mask, std::uint64_t seed) {
  check_shape(n, k, variant, perm_mask);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> vertex(0, n - 1);

  const std::size_t i = vertex(rng);
  std::vector<LayerFunction> fs;
  for (std::size_t h = 0; h < layer_count(k, variant); ++h) {
    std::vector<std::size_t> map(n);
    if (masked(perm_mask, h)) {
      std::iota(map.begin(), map.end(), std::size_t{0});
      std::shuffle(map.begin(), map.end(), rng);
    } else {
      for (auto& v : map) v = vertex(rng);
    }
    fs.emplace_back(std::move(map));
  }
  if (variant == Variant::MpjHat) return MpjHatInstance{n, i, std::move(fs), perm_mask};

  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return MpjInstance{n, i, std::move(fs), BitVector(std::move(bits))};
}

SampleStream::SampleStream(std::size_t n, std::size_t k, Variant variant,
                           std::vector<bool> perm_mask, std::uint64_t seed, std::uint64_t count)
    : n_(n), k_(k), variant_(variant), perm_mask_(std::move(perm_mask)), seed_(seed),
      count_(count) {
  check_shape(n, k, variant, perm_mask_);
}

std::optional<Instance> SampleStream::next() {
  if (produced_ >= count_) return std::nullopt;
  return sample_instance(n_, k_, variant_, perm_mask_, mix_seed(seed_, produced_++));
}

std::size_t ceil_log2(std::size_t n) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  return bits;
}

}  // namespace mpj
