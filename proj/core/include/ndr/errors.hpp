#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ndr {

// Base class for every error the library raises on purpose. Callers that
// want blanket handling catch this; tests catch the concrete types.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A string contains a byte sequence that is not a symbol of the system's
// alphabet. Raised before any rule is consulted.
struct symbol_not_in_alphabet : error {
  using error::error;
};

struct unknown_system : error {
  using error::error;
};

// Structured-text input could not be parsed. Carries file and line so CLI
// output can point at the offending record.
struct parse_error : error {
  parse_error(const std::string& file, std::size_t line, const std::string& what_arg)
      : error(file + ":" + std::to_string(line) + ": " + what_arg), file_name(file), line_number(line) {}
  explicit parse_error(const std::string& what_arg) : error(what_arg), line_number(0) {}
  std::string file_name;
  std::size_t line_number;
};

struct invalid_config : error {
  using error::error;
};

struct not_prefix_free : error {
  using error::error;
};

struct state_space_too_large : error {
  using error::error;
};

struct index_out_of_range : error {
  using error::error;
};

struct question_never_answered : error {
  using error::error;
};

struct conditioning_never_observed : error {
  using error::error;
};

struct conditioning_list_never_reached : error {
  using error::error;
};

// Conditional probability requested against an event of probability zero.
struct zero_denominator : error {
  using error::error;
};

// A conditional query whose conditioning event has no mass in the joint.
struct conditioning_undefined : error {
  using error::error;
};

// An inference check was invoked on a joint in which some question does not
// occur with probability one.
struct precedence_violated : error {
  using error::error;
};

struct invalid_weights : error {
  using error::error;
};

// A world build was requested from a configuration that can emit claims for
// more than one formal system.
struct delta_condition_violated : error {
  using error::error;
};

struct wff_never_answered : error {
  using error::error;
};

// A program string halted but has no entry in the supplied decoding table.
struct decoding_missing : error {
  using error::error;
};

}  // namespace ndr
