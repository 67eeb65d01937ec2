#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ndr {

// The four statuses a formal system can assign to a string over its
// alphabet. A string is a WFF exactly when its valence is not not_wff.
enum class valence : std::uint8_t {
  theorem = 0,
  antitheorem = 1,
  not_wff = 2,
  undecidable = 3,
};

inline constexpr std::array<valence, 4> all_valences{
    valence::theorem, valence::antitheorem, valence::not_wff, valence::undecidable};

constexpr std::size_t index_of(valence v) { return static_cast<std::size_t>(v); }

constexpr char to_char(valence v) {
  switch (v) {
    case valence::theorem: return 't';
    case valence::antitheorem: return 'a';
    case valence::not_wff: return 'n';
    case valence::undecidable: return 'u';
  }
  return '?';
}

constexpr std::string_view to_string(valence v) {
  switch (v) {
    case valence::theorem: return "theorem";
    case valence::antitheorem: return "antitheorem";
    case valence::not_wff: return "not-wff";
    case valence::undecidable: return "undecidable";
  }
  return "?";
}

constexpr std::optional<valence> valence_from_char(char c) {
  switch (c) {
    case 't': return valence::theorem;
    case 'a': return valence::antitheorem;
    case 'n': return valence::not_wff;
    case 'u': return valence::undecidable;
    default: return std::nullopt;
  }
}

// The three valences other than v, in enum order. Used by the answer kernel
// when a draw is corrupted.
constexpr std::array<valence, 3> wrong_valences(valence v) {
  std::array<valence, 3> out{};
  std::size_t n = 0;
  for (valence w : all_valences) {
    if (w != v) out[n++] = w;
  }
  return out;
}

}  // namespace ndr
