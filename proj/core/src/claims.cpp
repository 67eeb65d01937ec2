#include "ndr/claims.hpp"

#include <algorithm>

#include "ndr/errors.hpp"

namespace ndr {

claims_set::claims_set(std::vector<claim> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool claims_set::contains(const claim& c) const {
  return std::binary_search(items_.begin(), items_.end(), c);
}

bool claims_set::contained_in(const claims_list& list) const {
  for (const claim& c : items_) {
    if (!list_contains(list, c)) return false;
  }
  return true;
}

bool claims_set::subset_of(const claims_set& other) const {
  return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

claims_set claims_set::union_with(const claims_set& other) const {
  std::vector<claim> merged = items_;
  merged.insert(merged.end(), other.items_.begin(), other.items_.end());
  return claims_set(std::move(merged));
}

bool claims_set::intersects(const claims_set& other) const {
  for (const claim& c : items_) {
    if (other.contains(c)) return true;
  }
  return false;
}

bool list_contains(const claims_list& list, const claim& c) {
  return std::find(list.begin(), list.end(), c) != list.end();
}

bool list_contains_question(const claims_list& list, const question& q) {
  for (const claim& c : list) {
    if (c.q == q) return true;
  }
  return false;
}

bool distinct_questions(const claims_list& list) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      if (list[i].q == list[j].q) return false;
    }
  }
  return true;
}

bool proper_prefix_of(const claims_list& shorter, const claims_list& longer) {
  if (shorter.size() >= longer.size()) return false;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

bool valid_system_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string encode_question(const question& q) {
  return q.system + ":" + q.formula;
}

std::string encode_claim(const claim& c) {
  return encode_question(c.q) + "#" + to_char(c.v);
}

std::string encode_list(const claims_list& list) {
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += '|';
    out += encode_claim(list[i]);
  }
  return out;
}

std::string encode_set(const claims_set& set) {
  std::string out;
  const auto& items = set.items();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += '|';
    out += encode_claim(items[i]);
  }
  return out;
}

question decode_question(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw error("decode_question: missing ':' in '" + std::string(text) + "'");
  }
  question q{std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
  if (!valid_system_id(q.system)) {
    throw error("decode_question: invalid system id '" + q.system + "'");
  }
  return q;
}

claim decode_claim(std::string_view text) {
  const std::size_t hash = text.rfind('#');
  if (hash == std::string_view::npos || hash + 2 != text.size()) {
    throw error("decode_claim: expected 'system:formula#v' in '" + std::string(text) + "'");
  }
  const auto v = valence_from_char(text[hash + 1]);
  if (!v) throw error("decode_claim: unknown valence character in '" + std::string(text) + "'");
  return claim{decode_question(text.substr(0, hash)), *v};
}

claims_list decode_list(std::string_view text) {
  claims_list out;
  if (text.empty() || text == "(empty)") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t bar = text.find('|', start);
    if (bar == std::string_view::npos) bar = text.size();
    out.push_back(decode_claim(text.substr(start, bar - start)));
    if (bar == text.size()) break;
    start = bar + 1;
  }
  return out;
}

claims_set decode_set(std::string_view text) {
  claims_list list = decode_list(text);
  return claims_set(std::vector<claim>(list.begin(), list.end()));
}

}  // namespace ndr
