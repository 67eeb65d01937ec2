#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndr/alphabet.hpp"
#include "ndr/rng.hpp"

namespace ndr {

enum class head_move : std::int8_t { left = -1, stay = 0, right = 1 };

// One weighted outcome of an update rule. The type can only express local
// updates: one written cell and a head move of at most one position, so the
// locality condition cannot be violated by construction.
struct tm_outcome {
  std::uint32_t next_state;
  std::uint32_t write;
  head_move move;
  double weight = 1.0;
};

// A single-tape machine over a finite alphabet that includes a blank. The
// update map is total over (state, symbol) for non-halt states; rules with
// several weighted outcomes make the machine stochastic. The halt state has
// no rules and is a fixed point of step().
class tape_machine {
 public:
  struct rule {
    std::string state;
    std::string read;  // "*" expands to every symbol without an explicit rule
    struct outcome {
      double weight;
      std::string next_state;
      std::string write;  // "*" echoes the symbol read
      head_move move;
    };
    std::vector<outcome> outcomes;
  };

  // Throws invalid_config on structural problems: fewer than 3 symbols,
  // unknown state or symbol names, rules for the halt state, missing rules
  // for a non-halt state, or outcome weights that do not sum to 1 within
  // 1e-12 for some (state, symbol).
  tape_machine(std::string name, std::vector<std::string> states, alphabet symbols,
               std::string blank, std::string start, std::string halt, std::vector<rule> rules);

  static tape_machine load(const std::filesystem::path& file);
  static tape_machine parse(std::istream& in, const std::string& file_name);
  void save(std::ostream& out) const;

  const std::string& name() const { return name_; }
  const std::vector<std::string>& states() const { return states_; }
  const alphabet& symbols() const { return alphabet_; }
  std::uint32_t blank() const { return blank_; }
  std::uint32_t start_state() const { return start_; }
  std::uint32_t halt_state() const { return halt_; }
  bool deterministic() const { return deterministic_; }

  const std::vector<tm_outcome>& outcomes(std::uint32_t state, std::uint32_t read) const {
    return rules_[state * alphabet_.size() + read];
  }

 private:
  std::string name_;
  std::vector<std::string> states_;
  alphabet alphabet_;
  std::uint32_t blank_ = 0;
  std::uint32_t start_ = 0;
  std::uint32_t halt_ = 0;
  bool deterministic_ = true;
  std::vector<std::vector<tm_outcome>> rules_;  // indexed state * |alphabet| + symbol
};

// A machine mid-run: control state, head position, and the finitely many
// non-blank cells. Cells holding the blank are erased from the map so
// equality of configurations is structural.
struct machine_config {
  std::uint32_t state = 0;
  std::int64_t head = 0;
  std::map<std::int64_t, std::uint32_t> cells;

  std::uint32_t read(const tape_machine& m) const;
  void write(const tape_machine& m, std::int64_t pos, std::uint32_t symbol);
  bool operator==(const machine_config&) const = default;
};

// Input written from position 0 rightward, head at 0, start state. Throws
// symbol_not_in_alphabet when the input does not tokenize.
machine_config initial_config(const tape_machine& m, std::string_view input);

// One update. Configurations in the halt state are returned unchanged. The
// rng is consulted only when the applicable rule has several outcomes.
machine_config step(const tape_machine& m, const machine_config& c, rng& r);

struct halted {
  std::string output;
  std::uint64_t steps;
  bool operator==(const halted&) const = default;
};
struct budget_exhausted {
  std::uint64_t steps;
  bool operator==(const budget_exhausted&) const = default;
};
using run_outcome = std::variant<halted, budget_exhausted>;

// Runs from initial_config until the halt state or until `budget` updates
// have been applied. On halt, the output is the largest blank-delimited
// string of cells that contains the head position (empty when the head rests
// on a blank).
run_outcome run(const tape_machine& m, std::string_view input, std::uint64_t budget, rng& r);
// Deterministic machines only.
run_outcome run(const tape_machine& m, std::string_view input, std::uint64_t budget);

std::string output_at_halt(const tape_machine& m, const machine_config& c);

// The set of non-blank input strings of length 0..max_len that halt within
// the budget. A budget-truncated under-approximation of the true halting
// set; `truncated` records that. Deterministic machines only.
struct halting_set_result {
  std::vector<std::string> strings;
  unsigned max_len = 0;
  std::uint64_t budget = 0;
  bool truncated = true;
};
halting_set_result halting_set(const tape_machine& m, unsigned max_len, std::uint64_t budget);

// True when no string in the set is a proper prefix of another.
bool check_prefix_free(const std::vector<std::string>& strings);

// Weight 2^-|s| per halting string, normalized by omega, the total weight.
// Throws not_prefix_free when the (budget-truncated) halting set is not
// prefix-free, and invalid_config when it is empty.
struct coin_flip_result {
  std::vector<std::pair<std::string, double>> probabilities;  // sorted by string
  double omega = 0.0;
  halting_set_result halting;
};
coin_flip_result coin_flip_distribution(const tape_machine& m, unsigned max_len,
                                        std::uint64_t budget);

// An invertible recoding between the input language of a target machine and
// the input language of the machine that emulates it.
struct string_codec {
  std::function<std::string(std::string_view)> encode;
  std::function<std::string(std::string_view)> decode;
};

// Runs `host` on encode(input) and decodes the output. Budget exhaustion
// passes through unchanged.
run_outcome emulate(const tape_machine& host, const string_codec& codec, std::string_view input,
                    std::uint64_t budget);

// Checks the emulation contract over every target input of length
// 0..max_len: decode(run(host, encode(x))) == run(target, x) whenever both
// halt within the budget, and the codec round-trips on those inputs.
// Deterministic machines only.
struct emulation_report {
  std::uint64_t inputs_checked = 0;
  std::uint64_t both_halted = 0;
  bool agreed = true;
  bool codec_roundtrips = true;
  std::string first_disagreement;
};
emulation_report check_emulation(const tape_machine& host, const tape_machine& target,
                                 const string_codec& codec, unsigned max_len,
                                 std::uint64_t budget);

}  // namespace ndr
