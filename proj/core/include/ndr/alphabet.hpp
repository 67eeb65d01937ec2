#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ndr {

// An ordered set of symbols. A symbol is a nonempty byte string, typically a
// single character or one UTF-8 code point. Symbols may not contain
// whitespace, control bytes, or the separator characters reserved by the
// canonical encodings: backslash and  , ; : | # " '
//
// All alphabets draw from this one shared symbol universe, so strings from
// different systems can live in the same tables and trace files.
class alphabet {
 public:
  alphabet() = default;
  // Throws invalid_config on empty, duplicate, or reserved-character symbols.
  explicit alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::string& symbol(std::uint32_t id) const { return symbols_[id]; }
  bool contains(std::string_view symbol) const;
  std::optional<std::uint32_t> id_of(std::string_view symbol) const;

  // Greedy longest-match split of s into symbol ids. Unambiguous whenever no
  // symbol is a proper prefix of another; with prefixes the longest match
  // wins deterministically. Returns nullopt if some position opens with a
  // byte sequence that matches no symbol.
  std::optional<std::vector<std::uint32_t>> tokenize(std::string_view s) const;

  // First byte position tokenize() fails at, for diagnostics. Returns npos
  // when the whole string tokenizes.
  std::size_t first_bad_position(std::string_view s) const;

  bool operator==(const alphabet& other) const { return symbols_ == other.symbols_; }

  // True when sym is usable as an alphabet symbol (see class comment).
  static bool valid_symbol(std::string_view sym);

 private:
  std::vector<std::string> symbols_;
};

// Count of strings of length 0..max_len over `a` symbols. Throws
// invalid_config if the count does not fit in uint64.
std::uint64_t count_strings(std::size_t alphabet_size, unsigned max_len);

// Streams all strings of length 0..max_len over an alphabet, shortest first,
// same-length strings in lexicographic order of symbol ids.
class string_enumerator {
 public:
  string_enumerator(alphabet a, unsigned max_len);
  std::optional<std::string> next();

 private:
  alphabet alphabet_;
  unsigned max_len_;
  unsigned current_len_ = 0;
  bool done_ = false;
  std::vector<std::uint32_t> odometer_;
  std::string render() const;
};

// The string with the given rank in the order of string_enumerator.
std::string string_at_rank(const alphabet& a, std::uint64_t rank, unsigned max_len);

}  // namespace ndr
