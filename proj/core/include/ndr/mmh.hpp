#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ndr/estimation.hpp"
#include "ndr/tape_machine.hpp"

namespace ndr {

// One formal system together with an answer distribution for every WFF up to
// a length bound. Finite stand-in for the full object, which would quantify
// over all WFFs; the bound and estimation parameters ride along as metadata.
struct ndr_world {
  std::string system;
  unsigned length_bound = 0;
  std::uint64_t horizon = 0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  // formula -> distribution over the four valences, conditioned on answered.
  std::map<std::string, valence_distribution> answers;
};

// One formal system together with a claims set sampled from a machine bound
// to that system. The maximality flag is always relative to the horizon.
struct world_instance {
  std::string system;
  claims_set claims;
  std::uint64_t horizon = 0;
  bool maximal = false;
  bool horizon_truncated = true;
  auto operator<=>(const world_instance&) const = default;
};

// A probability measure over world instances.
struct mmh_measure {
  std::vector<std::pair<world_instance, double>> support;
  std::string generator;

  double total_mass() const;
  // Throws invalid_weights unless weights are nonnegative and sum to 1e-9 of 1.
  void validate() const;
};

// Builds the per-WFF answer table by Monte Carlo answer estimation. The
// config must name exactly one system (throws delta_condition_violated); any
// WFF up to the bound that no replica answers throws wff_never_answered.
ndr_world make_world(const ndr_config& cfg, const system_set& systems, unsigned length_bound,
                     const run_options& opt);

// One replica run to k_max. The maximality flag compares the replica's final
// tape against `probe_replicas` runs of the same machine: maximal when no
// observed tape properly extends it.
world_instance sample_world_instance(const ndr_config& cfg, const system_set& systems,
                                     std::uint64_t k_max, std::uint64_t seed,
                                     std::uint64_t probe_replicas = 64);

// Instance form: every claim carries its system's oracle valence.
bool classify_mistake_free(const world_instance& inst, const system_set& systems);
// World form: every answer distribution is a point mass on the oracle valence.
bool classify_mistake_free(const ndr_world& world, const system_set& systems, double tol = 0.0);

// ---------------------------------------------------------------------------
// Measure generators.

struct explicit_weights_spec {
  std::vector<std::pair<world_instance, double>> entries;
};

// Tabulates opt.replicas sampled instances of one machine; weights are
// frequencies, maximality judged within the same batch of tapes.
struct ndr_sampled_spec {
  ndr_config cfg;
  run_options opt;
};

// Enumerates the machine's halting programs, weighs program s by
// 2^(-|s|)/Omega, and maps each program to an instance through the decoding
// table. Requires a prefix-free halting set (not_prefix_free) and a complete
// table (decoding_missing).
struct coinflip_spec {
  tape_machine machine;
  unsigned max_input_len = 8;
  std::uint64_t step_budget = 4096;
  std::map<std::string, world_instance> decoding;
};

using measure_spec = std::variant<explicit_weights_spec, ndr_sampled_spec, coinflip_spec>;

mmh_measure build_mmh_measure(const measure_spec& spec, const system_set& systems);

// ---------------------------------------------------------------------------
// Measure queries.

struct measure_report {
  double mistake_free_mass = 0.0;
  std::map<std::string, double> mass_per_system;
  double entropy_bits = 0.0;  // over support weights
  std::size_t support_size = 0;
};

measure_report measure_statistics(const mmh_measure& m, const system_set& systems);

// Drops every instance with a mistake, renormalizes the rest. Throws
// zero_denominator when nothing mistake-free remains.
mmh_measure restrict_to_mistake_free(const mmh_measure& m, const system_set& systems);

// ---------------------------------------------------------------------------
// Structured-text files.

void save_world(std::ostream& out, const ndr_world& world);
ndr_world load_world(const std::string& path);

void save_measure(std::ostream& out, const mmh_measure& m);
mmh_measure load_measure(const std::string& path);

}  // namespace ndr
