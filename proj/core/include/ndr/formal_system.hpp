#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ndr/alphabet.hpp"
#include "ndr/claims.hpp"
#include "ndr/valence.hpp"

namespace ndr {

// How a system decides valences. Every kind classifies every string over its
// alphabet, and returns not_wff exactly for the strings that are not WFFs.
enum class rule_kind {
  // Propositional formulas; valence by enumerating all assignments of the
  // variables that occur. Tautology -> theorem, contradiction -> antitheorem,
  // contingent -> undecidable (the toy loop cannot settle such strings, so
  // they are filed with the statements no procedure in the system decides).
  truth_table,
  // Integer (in)equalities over single-digit numerals. True -> theorem,
  // false -> antitheorem; there are no undecidable strings.
  arithmetic_eval,
  // Finite lookup table plus a default valence for unlisted strings.
  explicit_table,
};

std::string_view to_string(rule_kind k);

// A toy formal system: an id, a finite alphabet that includes a negation
// symbol, and a total decidable valence rule. Immutable once constructed.
class formal_system {
 public:
  // Propositional logic over variables p q r with ~ ∧ ∨ → and parentheses.
  static formal_system make_prop();
  // Integer arithmetic comparisons over digits 0..digit_bound with + - = < >
  // and prefix ~. digit_bound 9 keeps all ten digits.
  static formal_system make_modarith(int digit_bound = 9);
  // Small explicit-table system over {0,1,u,~} exercising all four valences:
  // 0 is a theorem, 1 an antitheorem, u-prefixed strings are undecidable,
  // everything unlisted is not a WFF.
  static formal_system make_synthu();

  // Custom explicit-table system. The table keys must tokenize over the
  // alphabet; unlisted strings get default_valence.
  static formal_system make_explicit_table(std::string id, alphabet symbols,
                                           std::map<std::string, valence> table,
                                           valence default_valence);
  static formal_system make_truth_table(std::string id, alphabet symbols);
  static formal_system make_arithmetic(std::string id, alphabet symbols);

  // Loads one system from a structured text file. See docs/FORMATS in the
  // README for the grammar; errors carry file and line.
  static formal_system load(const std::filesystem::path& file);
  static formal_system parse(std::istream& in, const std::string& file_name);

  const std::string& id() const { return id_; }
  const alphabet& symbols() const { return alphabet_; }
  rule_kind kind() const { return kind_; }

  // Total over strings whose symbols all belong to the alphabet. Throws
  // symbol_not_in_alphabet otherwise; never throws for in-alphabet strings.
  valence classify(std::string_view s) const;
  bool is_wff(std::string_view s) const { return classify(s) != valence::not_wff; }

  // Explicit-table systems only: the table and default.
  const std::map<std::string, valence>& table() const { return table_; }
  valence default_valence() const { return default_valence_; }
  int digit_bound() const { return digit_bound_; }

  void save(std::ostream& out) const;

 private:
  formal_system() = default;
  void validate() const;

  std::string id_;
  alphabet alphabet_;
  rule_kind kind_ = rule_kind::explicit_table;
  std::map<std::string, valence> table_;
  valence default_valence_ = valence::not_wff;
  int digit_bound_ = 9;
  // truth_table: precomputed category per symbol id (see .cpp).
  std::vector<int> symbol_category_;
};

// All strings over the system's alphabet with length 0..max_len, shortest
// first. Throws invalid_config when the count exceeds max_count.
std::vector<std::string> enumerate_strings(const formal_system& fs, unsigned max_len,
                                           std::uint64_t max_count = 5'000'000);

// A registry of formal systems, used as the oracle set: the true valence of
// a question is the valence its own system assigns.
class system_set {
 public:
  void add(formal_system fs);
  bool has(std::string_view id) const;
  const formal_system& get(std::string_view id) const;  // throws unknown_system
  std::vector<std::string> ids() const;

  valence classify(const question& q) const;
  bool is_wff(const question& q) const;

  // PROP, MODARITH and SYNTHU.
  static system_set builtins();

 private:
  std::map<std::string, std::shared_ptr<const formal_system>> systems_;
};

}  // namespace ndr
