#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ndr/estimation.hpp"
#include "ndr/experiment_config.hpp"
#include "ndr/formal_system.hpp"

namespace ndrcli {

// Flags shared by every subcommand. Empty strings mean "not given".
struct global_options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
};

// A loaded configuration with overrides applied and systems resolved.
struct session {
  ndr::experiment_config cfg;
  ndr::system_set systems;
  unsigned threads = 1;

  ndr::run_options options() const {
    return ndr::run_options{cfg.horizon, cfg.replicas, cfg.seed, threads};
  }
};

// Loads the config file, applies --seed/--out/--format, loads builtin and
// file systems, and validates the machine configuration against them.
session open_session(const global_options& g);

// Thread count: config value, else the NDR_THREADS environment variable,
// else 1.
unsigned resolve_threads(unsigned cfg_threads);

// Auxiliary input paths (joints, measures, machines) resolve relative to the
// config file's directory, like system_files.
std::string resolve_near_config(const global_options& g, const std::string& file);

// Creates the directory (and parents) when missing.
void ensure_out_dir(const std::string& dir);
// Writes content to dir/name, creating dir first.
void write_file(const std::string& dir, const std::string& name, const std::string& content);
void write_effective_config(const session& s);

std::string render_outcome(const std::string& key);  // "" -> "(empty)"

int cmd_simulate(const global_options& g);
int cmd_estimate(const global_options& g);
int cmd_check(const global_options& g);
int cmd_graph(const global_options& g, const std::string& trace_path, std::uint64_t horizon);
int cmd_ptm(const global_options& g, const std::string& machine_path, const std::string& action,
            const std::string& input, unsigned max_len, std::uint64_t budget);
int cmd_mmh(const global_options& g);

}  // namespace ndrcli
