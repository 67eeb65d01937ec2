#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "ndr/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ndr: simulate noisy reasoning machines over toy formal systems,\n"
               "estimate claim and answer distributions, and machine-check the\n"
               "Bayesian identities behind abduction and proof-path accumulation."};
  app.require_subcommand(1);
  app.fallthrough();

  ndrcli::global_options g;
  std::uint64_t seed_flag = 0;
  app.add_option("--config", g.config_path, "Experiment configuration (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_flag, "Override the config seed");
  app.add_option("--out", g.out_dir, "Override the config output directory");
  app.add_option("--format", g.format, "Override the report format (csv or text)")
      ->check(CLI::IsMember({"csv", "text"}));

  auto* simulate = app.add_subcommand("simulate", "Run replicas and write traces and summaries");
  auto* estimate = app.add_subcommand(
      "estimate", "Monte Carlo estimates (and exact distributions) for configured queries");
  auto* check = app.add_subcommand(
      "check", "Check Bayesian identities on randomized suites or a stored joint");

  auto* graph = app.add_subcommand("graph", "Rebuild the tape transition graph from a trace");
  std::string trace_path;
  std::uint64_t graph_horizon = 0;
  graph->add_option("--trace", trace_path, "Trace file written by simulate")->required();
  graph->add_option("--horizon", graph_horizon, "Iterations to replay (0: use the trace)");

  auto* ptm = app.add_subcommand("ptm", "Run and analyze tape machines");
  std::string machine_path;
  std::string ptm_action;
  std::string ptm_input;
  unsigned ptm_max_len = 6;
  std::uint64_t ptm_budget = 4096;
  ptm->add_option("--machine", machine_path, "Machine description file")->required();
  ptm->add_option("--action", ptm_action, "run | halting-set | coinflip | check-prefix-free")
      ->required();
  ptm->add_option("--input", ptm_input, "Input string for --action run");
  ptm->add_option("--max-len", ptm_max_len, "Input length bound for set and distribution actions");
  ptm->add_option("--budget", ptm_budget, "Step budget per run");

  auto* mmh = app.add_subcommand("mmh", "Build worlds, instances, and measures over them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (seed_opt->count() > 0) g.seed = seed_flag;

  try {
    if (simulate->parsed()) return ndrcli::cmd_simulate(g);
    if (estimate->parsed()) return ndrcli::cmd_estimate(g);
    if (check->parsed()) return ndrcli::cmd_check(g);
    if (graph->parsed()) return ndrcli::cmd_graph(g, trace_path, graph_horizon);
    if (ptm->parsed())
      return ndrcli::cmd_ptm(g, machine_path, ptm_action, ptm_input, ptm_max_len, ptm_budget);
    if (mmh->parsed()) return ndrcli::cmd_mmh(g);
  } catch (const ndr::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: a subcommand is required
}
