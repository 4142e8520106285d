#include "mpj/lab.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mpj::lab {

using nlohmann::json;

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

std::optional<std::size_t> suffix_number(const std::string& name, const std::string& prefix) {
  if (!starts_with(name, prefix) || name.size() == prefix.size()) return std::nullopt;
  std::size_t value = 0;
  const char* first = name.data() + prefix.size();
  const char* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

PermProtocol3 perm_protocol(const std::string& name, std::size_t n) {
  if (name != "naive") throw std::invalid_argument("unknown --perm-protocol '" + name + "'");
  return naive_perm_protocol(n);
}

ProtocolHandle broken_const(std::size_t n, std::size_t k) {
  ProtocolHandle h;
  h.name = "broken-const";
  h.n = n;
  h.k = k;
  h.variant = Variant::Mpj;
  h.view = ViewKind::FullOneWay;
  h.players.assign(k, [](const PlayerView&) { return Message{}; });
  h.players[k - 1] = [n](const PlayerView&) { return encode_output(Variant::Mpj, n, 0); };
  return h;
}

double standard_bucketing_bound(const BucketPlan& plan) {
  std::size_t worst = 0;
  for (std::size_t j = 2; j <= plan.k - 1; ++j) {
    const std::size_t s_max = BucketingScheme(plan.bits(j - 1), plan.n).max_bucket_size();
    worst = std::max(worst, plan.n + s_max * plan.bits(j));
  }
  return static_cast<double>(plan.n * plan.bits(1) + (plan.k - 2) * worst);
}

std::size_t header_k(const ExperimentConfig& config) {
  return config.protocol == "index" ? 2 : config.k;
}

template <typename Fn>
void with_output(const ExperimentConfig& config, std::ostream& out, Fn&& body) {
  if (config.output.empty()) {
    body(out);
    return;
  }
  std::ofstream file(config.output);
  if (!file) throw std::runtime_error("cannot write " + config.output);
  body(file);
}

void write_rows(const ExperimentConfig& config, const std::vector<ResultRow>& rows,
                std::ostream& out) {
  with_output(config, out, [&](std::ostream& os) {
    if (config.format == "json") {
      json doc = json::array();
      for (const auto& r : rows) doc.push_back(row_to_json(r));
      os << doc.dump(2) << '\n';
      return;
    }
    os << csv_header(header_k(config)) << '\n';
    for (const auto& r : rows) os << csv_row(r) << '\n';
  });
}

void emit_buckets(const ExperimentConfig& config) {
  if (config.emit_buckets.empty()) return;
  const bool doubling = config.protocol == "bucketing-doubling";
  if (!doubling && config.protocol != "bucketing") {
    throw std::invalid_argument("--emit-buckets needs a bucketing protocol");
  }
  json doc = json::array();
  for (std::size_t n : config.n_values) {
    doc.push_back(bucket_plan_json(doubling ? make_doubling_plan(n, config.k)
                                            : make_bucket_plan(n, config.k)));
  }
  std::ofstream file(config.emit_buckets);
  if (!file) throw std::runtime_error("cannot write " + config.emit_buckets);
  file << doc.dump(2) << '\n';
}

json vertices_json(std::span<const std::size_t> zero_based) {
  json a = json::array();
  for (auto v : zero_based) a.push_back(v + 1);
  return a;
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MPJ_SEED")) {
    std::uint64_t value = 0;
    const char* last = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, last, value);
    if (ec == std::errc{} && ptr == last && ptr != env) return value;
  }
  return 1;
}

ProtocolSpec make_protocol(const std::string& name, std::size_t n, std::size_t k,
                           std::optional<std::size_t> d, const std::string& perm_name,
                           std::uint64_t seed) {
  const double nn = static_cast<double>(n);
  ProtocolSpec entry;
  if (name == "index") {
    entry.handle = index_protocol(n);
    entry.bound = nn;
  } else if (name == "mpj3-sublinear") {
    const PermProtocol3 p = perm_protocol(perm_name, n);
    const std::size_t dd = d.value_or(2);
    entry.handle = mpj3_sublinear(p, dd);
    entry.bound = 2.0 * dd * p.m + nn / dd;
  } else if (name == "mpjk-sublinear") {
    const PermProtocol3 p = perm_protocol(perm_name, n);
    const std::size_t dd = d.value_or(2);
    entry.handle = mpjk_sublinear(p, dd, k);
    entry.bound = 2.0 * (k - 2) * dd * p.m + nn / std::pow(dd, k - 2);
  } else if (name == "bucketing" || name == "bucketing-doubling") {
    const bool doubling = name == "bucketing-doubling";
    const BucketPlan plan = doubling ? make_doubling_plan(n, k) : make_bucket_plan(n, k);
    entry.handle = bucketing_protocol(plan);
    entry.perm_mask.assign(k - 1, true);
    entry.bound = doubling ? static_cast<double>(bucketing_cost_bound(plan))
                          : standard_bucketing_bound(plan);
  } else if (name == "broken-const") {
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    entry.handle = broken_const(n, k);
  } else if (name == "full") {
    entry.handle = full_suffix_protocol(n, k);
    entry.bound = static_cast<double>((k - 1) * n);
  } else if (auto t = suffix_number(name, "truncate")) {
    entry.handle = truncation_protocol(n, k, *t);
  } else if (auto t = suffix_number(name, "parity")) {
    entry.handle = parity_protocol(n, k, *t, seed);
  } else if (auto t = suffix_number(name, "hash")) {
    entry.handle = hash_protocol(n, k, *t, seed);
  } else {
    throw std::invalid_argument("unknown protocol '" + name + "'");
  }
  if (!entry.bound && entry.handle.declared_max_bits) {
    entry.bound = static_cast<double>((k - 1) * *entry.handle.declared_max_bits);
  }
  return entry;
}

ResultRow evaluate(const ExperimentConfig& config, std::size_t n) {
  const ProtocolSpec entry =
      make_protocol(config.protocol, n, config.k, config.d, config.perm_protocol, config.seed);
  const ProtocolHandle& h = entry.handle;
  std::unique_ptr<InstanceStream> source;
  if (config.exhaustive) {
    source = std::make_unique<InstanceEnumerator>(n, h.k, h.variant, entry.perm_mask, config.budget);
  } else {
    source = std::make_unique<SampleStream>(n, h.k, h.variant, entry.perm_mask, config.seed,
                                            config.samples);
  }
  const VerifyReport report = verify(h, *source);

  ResultRow row;
  row.n = n;
  row.k = h.k;
  row.protocol = h.name;
  row.view = h.view;
  row.checked = report.checked;
  row.failures = report.failures.size();
  row.max_cost = report.worst_cost;
  row.max_message_cost = report.worst_message_cost;
  row.per_player_max = report.per_player_max_bits;
  row.bound = entry.bound;
  row.bound_ok = !entry.bound || static_cast<double>(row.max_message_cost) <= *entry.bound + 1e-9;
  return row;
}

std::string csv_header(std::size_t k) {
  return cost_csv_header(k) + ",checked,failures,message_cost,bound,bound_ok";
}

std::string csv_row(const ResultRow& row) {
  CostRow base;
  base.n = row.n;
  base.k = row.k;
  base.protocol = row.protocol;
  base.view = row.view;
  base.max_cost = row.max_cost;
  base.per_player_max = row.per_player_max;
  std::ostringstream os;
  os << cost_csv_row(base) << ',' << row.checked << ',' << row.failures << ','
     << row.max_message_cost << ',';
  if (row.bound) os << *row.bound;
  os << ',' << (row.bound_ok ? "true" : "false");
  return os.str();
}

json row_to_json(const ResultRow& row) {
  json j;
  j["n"] = row.n;
  j["k"] = row.k;
  j["protocol"] = row.protocol;
  j["view"] = std::string(to_string(row.view));
  j["checked"] = row.checked;
  j["failures"] = row.failures;
  j["max_cost"] = row.max_cost;
  j["message_cost"] = row.max_message_cost;
  j["per_player_max_bits"] = row.per_player_max;
  j["bound"] = row.bound ? json(*row.bound) : json(nullptr);
  j["bound_ok"] = row.bound_ok;
  return j;
}

json bucket_plan_json(const BucketPlan& plan) {
  json doc;
  doc["n"] = plan.n;
  doc["k"] = plan.k;
  doc["doubling"] = plan.doubling;
  doc["b"] = plan.b;
  doc["last_active"] = plan.last_active;
  json schemes = json::array();
  for (std::size_t j = 1; j <= plan.last_active; ++j) {
    const BucketingScheme scheme(plan.bits(j), plan.n);
    json buckets = json::array();
    for (std::size_t b = 0; b < scheme.bucket_count(); ++b) {
      buckets.push_back(vertices_json(scheme.members(b)));
    }
    schemes.push_back({{"player", j}, {"bits", plan.bits(j)}, {"buckets", buckets}});
  }
  doc["schemes"] = schemes;
  return doc;
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  if (config.instance_path.empty()) throw std::invalid_argument("run needs --instance");
  const Instance inst = read_instance(config.instance_path);
  const ProtocolSpec entry = make_protocol(config.protocol, width_of(inst), players_of(inst),
                                          config.d, config.perm_protocol, config.seed);
  const Transcript t = run(entry.handle, inst);
  const std::size_t expected = eval(inst);
  json doc = transcript_to_json(t, variant_of(inst));
  doc["protocol"] = entry.handle.name;
  doc["expected"] = variant_of(inst) == Variant::Mpj ? expected : expected + 1;
  doc["correct"] = t.output == expected;
  with_output(config, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (t.output != expected) {
    err << "protocol output differs from the oracle\n";
    return Failures;
  }
  return Ok;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  emit_buckets(config);
  std::vector<ResultRow> rows;
  std::size_t failures = 0;
  for (std::size_t n : config.n_values) {
    rows.push_back(evaluate(config, n));
    const ResultRow& r = rows.back();
    failures += r.failures;
    err << r.protocol << " n=" << r.n << " k=" << r.k << ": " << r.checked << " checked, "
        << r.failures << " failures\n";
  }
  write_rows(config, rows, out);
  return failures == 0 ? Ok : Failures;
}

int cmd_bench(const ExperimentConfig& config, std::ostream& out, std::ostream&) {
  emit_buckets(config);
  std::vector<ResultRow> rows;
  for (std::size_t n : config.n_values) rows.push_back(evaluate(config, n));
  write_rows(config, rows, out);
  return Ok;
}

int cmd_cover(const ExperimentConfig& config, std::ostream& out, std::ostream&) {
  if (config.cover_f.empty()) throw std::invalid_argument("cover needs --f");
  if (!config.d || *config.d == 0) throw std::invalid_argument("cover needs --d >= 1");
  const std::size_t n = config.cover_f.size();
  for (auto v : config.cover_f) {
    if (v < 1 || v > n) throw ValidationError("--f values must lie in [1, " + std::to_string(n) + "]");
  }
  const LayerFunction f = LayerFunction::from_one_based(config.cover_f);
  const std::size_t d = *config.d;

  json doc;
  doc["f"] = config.cover_f;
  doc["d"] = d;
  const FiberPartition part = build_fiber_partition(f);
  doc["range"] = vertices_json(part.range);
  json fibers = json::array();
  for (const auto& fiber : part.fibers) fibers.push_back(vertices_json(fiber));
  json blocks = json::array();
  for (const auto& block : part.blocks) blocks.push_back(vertices_json(block));
  doc["fibers"] = fibers;
  doc["blocks"] = blocks;

  CoverSet cover;
  CoverCheck check;
  if (config.cover_scope) {
    std::vector<std::size_t> scope;
    for (auto v : *config.cover_scope) {
      if (v < 1 || v > n) throw ValidationError("--scope values must lie in [1, n]");
      scope.push_back(v - 1);
    }
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    cover = build_sd_cover(f, scope, d);
    check = verify_sd_cover(cover.perms, f, scope, d);
    doc["scope"] = vertices_json(scope);
  } else {
    cover = build_d_cover(f, d);
    check = verify_d_cover(cover.perms, f, d);
  }
  json perms = json::array();
  for (const auto& p : cover.perms) perms.push_back(p.to_one_based());
  doc["perms"] = perms;
  doc["verified"] = check.covered;
  if (check.witness) doc["uncovered"] = *check.witness + 1;
  with_output(config, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return check.covered ? Ok : Failures;
}

int cmd_attack(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  if (config.n_values.size() != 1) throw std::invalid_argument("attack takes a single --n");
  const std::size_t n = config.n_values.front();
  if (n > 16 && !config.allow_large) {
    throw std::invalid_argument("attack enumerates C(n, n/2) strings per level; n > 16 needs "
                                "--allow-large");
  }
  const ProtocolSpec entry =
      make_protocol(config.protocol, n, config.k, config.d, config.perm_protocol, config.seed);
  FoolingPair pair;
  try {
    pair = build_fooling_inputs(entry.handle);
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << '\n';
    return Usage;
  }
  const FoolingReport report = verify_fooling(entry.handle, pair.inst0, pair.inst1);

  json doc;
  doc["protocol"] = entry.handle.name;
  doc["n"] = n;
  doc["k"] = entry.handle.k;
  doc["inst0"] = instance_to_json(pair.inst0);
  doc["inst1"] = instance_to_json(pair.inst1);
  json prefix = json::array();
  for (const auto& m : pair.transcript_prefix) prefix.push_back(m.to_string());
  doc["transcript_prefix"] = prefix;
  doc["outputs"] = report.outputs;
  doc["expected"] = report.expected;
  doc["prefix_equal"] = report.prefix_equal;
  doc["fooled"] = report.fooled();
  with_output(config, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  if (!report.fooled()) {
    err << "fooling pair did not confirm an error\n";
    return Failures;
  }
  return Ok;
}

int cmd_emit_plot_data(const ExperimentConfig& config, std::ostream& out, std::ostream&) {
  struct Series {
    std::string protocol;
    std::size_t k;
  };
  const std::vector<Series> series = {{"index", 2},
                                      {"mpj3-sublinear", 3},
                                      {"mpjk-sublinear", std::max<std::size_t>(config.k, 4)},
                                      {"bucketing", std::max<std::size_t>(config.k, 3)},
                                      {"bucketing-doubling", std::max<std::size_t>(config.k, 3)}};
  with_output(config, out, [&](std::ostream& os) {
    os << "protocol,n,k,view,checked,failures,message_cost,bound\n";
    for (const auto& s : series) {
      ExperimentConfig c = config;
      c.protocol = s.protocol;
      c.k = s.k;
      c.exhaustive = false;
      for (std::size_t n : config.n_values) {
        const ResultRow r = evaluate(c, n);
        os << r.protocol << ',' << r.n << ',' << r.k << ',' << to_string(r.view) << ','
           << r.checked << ',' << r.failures << ',' << r.max_message_cost << ','
           << (r.bound ? *r.bound : 0.0) << '\n';
      }
    }
  });
  return Ok;
}

int dispatch(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "csv" && config.format != "json") {
      throw std::invalid_argument("--format must be csv or json");
    }
    if (config.command == "run") return cmd_run(config, out, err);
    if (config.command == "verify") return cmd_verify(config, out, err);
    if (config.command == "bench") return cmd_bench(config, out, err);
    if (config.command == "cover") return cmd_cover(config, out, err);
    if (config.command == "attack") return cmd_attack(config, out, err);
    if (config.command == "emit-plot-data") return cmd_emit_plot_data(config, out, err);
    throw std::invalid_argument("unknown command '" + config.command + "'");
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return Failures;
  } catch (const AdversaryFailure& e) {
    err << "adversary failure: " << e.what() << '\n';
    return Failures;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return Usage;
  }
}

}  // namespace mpj::lab
