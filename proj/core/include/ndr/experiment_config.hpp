#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ndr/ndr_machine.hpp"

namespace ndr {

// One requested distribution table for the estimate command.
struct estimate_request {
  // pk | answer | generalized | claims | list-claims | list-answer | maximal
  std::string type;
  unsigned n = 1;            // pk: prefix length
  std::string question;      // encoded question
  std::string conditioning;  // encoded claims set ("" or "(empty)" allowed)
  std::string through;       // encoded claims list for passage conditioning
  std::string set;           // encoded claims set for containment estimates
  bool operator==(const estimate_request&) const = default;
};

struct check_section {
  std::string suite;  // abduction | proofpath | both | "" (none)
  std::uint64_t abduction_trials = 10000;
  std::uint64_t proofpath_trials = 1000;
  std::string joint_file;     // run single-joint checks against this file
  std::string question;       // abduction q on the loaded joint
  std::string question2;      // abduction q'
  std::vector<std::string> paths;  // encoded claims sets for proof paths
  bool operator==(const check_section&) const = default;
};

// A decoded world instance named by a coinflip program string.
struct decoded_instance {
  std::string system;
  std::string set;  // encoded claims set
  std::uint64_t horizon = 0;
  bool maximal = false;
  bool operator==(const decoded_instance&) const = default;
};

struct mmh_section {
  std::string action;  // world | instance | measure | "" (none)
  unsigned bound = 2;
  std::uint64_t probe_replicas = 64;
  // explicit-weights | ndr-machine-sampled | coinflip-program-induced
  std::string generator;
  std::string measure_file;  // explicit-weights input
  std::string machine_file;  // coinflip program machine
  unsigned max_input_len = 8;
  std::uint64_t step_budget = 4096;
  std::map<std::string, decoded_instance> decoding;
  bool restrict_mistake_free = false;
  bool operator==(const mmh_section&) const = default;
};

// Everything a CLI run needs, loadable from and savable to JSON. Saving emits
// every field (defaults filled in), so an emitted effective config reparses
// to an equal value.
struct experiment_config {
  ndr_config ndr;
  std::vector<std::string> system_files;  // extra systems loaded before validation
  std::uint64_t horizon = 16;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  std::uint64_t trace_replicas = 1;
  unsigned threads = 0;  // 0: take the environment default
  std::string out_dir = "out";
  std::string format = "csv";  // csv | text
  std::vector<estimate_request> estimates;
  bool exact_enabled = false;
  std::size_t exact_max_states = 100000;
  check_section check;
  mmh_section mmh;

  bool operator==(const experiment_config&) const = default;

  // Structural checks that need no system set: known enumeration values,
  // rates in range, decodable encoded fields. Throws invalid_config.
  void validate_shape() const;

  static experiment_config load(const std::string& path);       // throws parse_error
  static experiment_config from_json_text(const std::string& text,
                                          const std::string& source_name);
  std::string to_json_text() const;  // canonical, two-space indent, sorted keys
  void save(std::ostream& out) const;
};

}  // namespace ndr
