// mpjlab: verification sweeps, cost tables, covers and attacks for
// multiparty pointer jumping protocols.
#include "mpj/lab.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size()) throw CLI::ValidationError("--n", "not a number: " + item);
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiparty pointer jumping lab"};
  app.require_subcommand(1);

  mpj::lab::ExperimentConfig config;
  config.seed = mpj::lab::default_seed();
  std::optional<std::string> n_text;
  std::optional<std::size_t> d;
  std::optional<std::string> f_text;
  std::optional<std::string> scope_text;

  auto common = [&](CLI::App* sub, bool samples) {
    sub->add_option("--protocol", config.protocol, "Protocol name")->required();
    sub->add_option("--n", n_text, "Comma-separated list of n");
    sub->add_option("--k", config.k, "Number of players");
    sub->add_option("--d", d, "Cover size d");
    sub->add_option("--perm-protocol", config.perm_protocol, "Inner 3-player protocol");
    sub->add_option("--seed", config.seed, "Seed (default from MPJ_SEED, else 1)");
    sub->add_option("--out", config.output, "Output file (default stdout)");
    sub->add_option("--format", config.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (samples) {
      sub->add_option("--samples", config.samples, "Seeded samples per n");
      sub->add_flag("--exhaustive", config.exhaustive, "Enumerate every instance");
      sub->add_option("--budget", config.budget, "Instance budget for --exhaustive");
      sub->add_option("--emit-buckets", config.emit_buckets, "Write bucket schemes as JSON");
    }
  };

  auto* run = app.add_subcommand("run", "Run a protocol on an instance file");
  common(run, false);
  run->add_option("--instance", config.instance_path, "Instance JSON")->required();
  auto* verify = app.add_subcommand("verify", "Check a protocol against the oracle");
  common(verify, true);
  auto* bench = app.add_subcommand("bench", "Cost table per n");
  common(bench, true);
  auto* cover = app.add_subcommand("cover", "Build and check a d-cover or (S,d)-cover");
  cover->add_option("--f", f_text, "Function values, 1-based, comma-separated")->required();
  cover->add_option("--d", d, "Cover size d")->required();
  cover->add_option("--scope", scope_text, "Restrict to S (1-based, comma-separated)");
  cover->add_option("--out", config.output, "Output file (default stdout)");
  auto* attack = app.add_subcommand("attack", "Build a fooling pair");
  common(attack, false);
  attack->add_flag("--allow-large", config.allow_large, "Permit n > 16");
  auto* plot = app.add_subcommand("emit-plot-data", "Long-format cost data for plotting");
  plot->add_option("--n", n_text, "Comma-separated list of n");
  plot->add_option("--k", config.k, "Number of players for the k-player series");
  plot->add_option("--samples", config.samples, "Seeded samples per n");
  plot->add_option("--seed", config.seed, "Seed (default from MPJ_SEED, else 1)");
  plot->add_option("--out", config.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
    config.command = app.get_subcommands().front()->get_name();
    config.d = d;
    if (n_text) {
      config.n_values = parse_list(*n_text);
    } else if (config.command == "emit-plot-data") {
      config.n_values = {4, 8, 16};
    } else {
      config.n_values = {8};
    }
    if (f_text) config.cover_f = parse_list(*f_text);
    if (scope_text) config.cover_scope = parse_list(*scope_text);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mpj::lab::Usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mpj::lab::Usage;
  }
  return mpj::lab::dispatch(config, std::cout, std::cerr);
}
