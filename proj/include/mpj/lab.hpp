// lab.hpp
//
// Experiment harness behind the mpjlab command line: protocol registry,
// verification sweeps, cost tables, cover inspection and attacks.
#pragma once

#include "mpj/adversary.hpp"
#include "mpj/bucketing.hpp"
#include "mpj/instance_io.hpp"
#include "mpj/jump_protocols.hpp"

#include <iosfwd>

namespace mpj::lab {

enum Exit : int { Ok = 0, Failures = 1, Usage = 2 };

struct ExperimentConfig {
  std::string command;
  std::string protocol;
  std::vector<std::size_t> n_values;
  std::size_t k = 3;
  std::optional<std::size_t> d;
  std::string perm_protocol = "naive";
  std::uint64_t seed = 1;
  std::uint64_t samples = 1000;
  bool exhaustive = false;
  std::uint64_t budget = 5'000'000;
  std::string output;  // empty: stdout
  std::string format = "csv";
  std::string emit_buckets;  // path for bucket-scheme JSON
  bool allow_large = false;  // attack beyond n = 16
  std::string instance_path;
  std::vector<std::size_t> cover_f;  // 1-based
  std::optional<std::vector<std::size_t>> cover_scope;
};

/// MPJ_SEED if set and numeric, otherwise 1.
std::uint64_t default_seed();

struct ProtocolSpec {
  ProtocolHandle handle;
  std::vector<bool> perm_mask;  // for samplers and enumerators
  /// Bound on the players 1..k-1 communication, when the protocol has one.
  std::optional<double> bound;
};

/// Throws std::invalid_argument for unknown names or unusable parameters.
ProtocolSpec make_protocol(const std::string& name, std::size_t n, std::size_t k,
                           std::optional<std::size_t> d, const std::string& perm_protocol,
                           std::uint64_t seed);

struct ResultRow {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string protocol;
  ViewKind view = ViewKind::FullOneWay;
  std::uint64_t checked = 0;
  std::size_t failures = 0;
  std::size_t max_cost = 0;
  std::size_t max_message_cost = 0;
  std::vector<std::size_t> per_player_max;
  std::optional<double> bound;
  bool bound_ok = true;
};

ResultRow evaluate(const ExperimentConfig& config, std::size_t n);

std::string csv_header(std::size_t k);
std::string csv_row(const ResultRow& row);
nlohmann::json row_to_json(const ResultRow& row);

nlohmann::json bucket_plan_json(const BucketPlan& plan);

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_cover(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_attack(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_emit_plot_data(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.command and maps exceptions to exit codes.
int dispatch(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mpj::lab
