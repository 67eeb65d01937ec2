#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "ndr/valence.hpp"

namespace ndr {

// A question names a string of a formal system. System ids are restricted to
// [A-Za-z0-9_.-]; formulas are strings over the system's alphabet, which
// excludes the separator characters used by the canonical encodings below.
struct question {
  std::string system;
  std::string formula;
  auto operator<=>(const question&) const = default;
};

// A claim is an answered question: the pair (question, valence).
struct claim {
  question q;
  valence v;
  auto operator<=>(const claim&) const = default;
};

// The claims tape: claims in the order they were committed.
using claims_list = std::vector<claim>;

// An unordered collection of claims, kept sorted and deduplicated so that
// equality and containment are canonical.
class claims_set {
 public:
  claims_set() = default;
  explicit claims_set(std::vector<claim> items);

  const std::vector<claim>& items() const { return items_; }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  bool contains(const claim& c) const;
  // True when every claim of this set occurs somewhere in the list.
  bool contained_in(const claims_list& list) const;
  bool subset_of(const claims_set& other) const;
  claims_set union_with(const claims_set& other) const;
  bool intersects(const claims_set& other) const;

  auto operator<=>(const claims_set&) const = default;

  static claims_set from_list(const claims_list& list) {
    return claims_set(std::vector<claim>(list.begin(), list.end()));
  }

 private:
  std::vector<claim> items_;
};

bool list_contains(const claims_list& list, const claim& c);
bool list_contains_question(const claims_list& list, const question& q);
// True when the list holds no two claims with equal questions.
bool distinct_questions(const claims_list& list);
// True when `shorter` is a proper prefix of `longer`.
bool proper_prefix_of(const claims_list& shorter, const claims_list& longer);

// Canonical one-line encodings. A question encodes as  system:formula  and a
// claim as  system:formula#v  with v one of t/a/n/u. Lists join claims with
// '|' in tape order; sets join sorted claims with '|'. The empty list and
// empty set encode as the empty string; presentation layers may render that
// as "(empty)". All separator characters are excluded from system ids and
// alphabet symbols, so decoding is unambiguous.
std::string encode_question(const question& q);
std::string encode_claim(const claim& c);
std::string encode_list(const claims_list& list);
std::string encode_set(const claims_set& set);

question decode_question(std::string_view text);
claim decode_claim(std::string_view text);
claims_list decode_list(std::string_view text);
claims_set decode_set(std::string_view text);

bool valid_system_id(std::string_view id);

}  // namespace ndr
