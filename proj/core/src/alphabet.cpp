#include "ndr/alphabet.hpp"

#include <algorithm>
#include <set>

#include "ndr/errors.hpp"

namespace ndr {

namespace {
constexpr std::string_view kReserved = ",;:|#\"'\\";
}

bool alphabet::valid_symbol(std::string_view sym) {
  if (sym.empty()) return false;
  for (unsigned char c : sym) {
    if (c < 0x21) return false;  // control bytes and whitespace
    if (c == 0x7f) return false;
    if (kReserved.find(static_cast<char>(c)) != std::string_view::npos) return false;
  }
  return true;
}

alphabet::alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw invalid_config("alphabet: must contain at least one symbol");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!valid_symbol(s)) {
      throw invalid_config("alphabet: symbol '" + s + "' is empty or contains a reserved character");
    }
    if (!seen.insert(s).second) {
      throw invalid_config("alphabet: duplicate symbol '" + s + "'");
    }
  }
}

bool alphabet::contains(std::string_view symbol) const {
  return id_of(symbol).has_value();
}

std::optional<std::uint32_t> alphabet::id_of(std::string_view symbol) const {
  for (std::uint32_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == symbol) return i;
  }
  return std::nullopt;
}

std::optional<std::vector<std::uint32_t>> alphabet::tokenize(std::string_view s) const {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t best_len = 0;
    std::uint32_t best_id = 0;
    for (std::uint32_t i = 0; i < symbols_.size(); ++i) {
      const std::string& sym = symbols_[i];
      if (sym.size() > best_len && s.compare(pos, sym.size(), sym) == 0) {
        best_len = sym.size();
        best_id = i;
      }
    }
    if (best_len == 0) return std::nullopt;
    out.push_back(best_id);
    pos += best_len;
  }
  return out;
}

std::size_t alphabet::first_bad_position(std::string_view s) const {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t best_len = 0;
    for (const auto& sym : symbols_) {
      if (sym.size() > best_len && s.compare(pos, sym.size(), sym) == 0) best_len = sym.size();
    }
    if (best_len == 0) return pos;
    pos += best_len;
  }
  return std::string_view::npos;
}

std::uint64_t count_strings(std::size_t alphabet_size, unsigned max_len) {
  std::uint64_t total = 0;
  std::uint64_t level = 1;  // count of strings of the current length
  for (unsigned len = 0; len <= max_len; ++len) {
    if (total > UINT64_MAX - level) throw invalid_config("count_strings: string count overflows uint64");
    total += level;
    if (len < max_len) {
      if (level > UINT64_MAX / alphabet_size) {
        throw invalid_config("count_strings: string count overflows uint64");
      }
      level *= alphabet_size;
    }
  }
  return total;
}

string_enumerator::string_enumerator(alphabet a, unsigned max_len)
    : alphabet_(std::move(a)), max_len_(max_len) {}

std::string string_enumerator::render() const {
  std::string out;
  for (std::uint32_t id : odometer_) out += alphabet_.symbol(id);
  return out;
}

std::optional<std::string> string_enumerator::next() {
  if (done_) return std::nullopt;
  if (current_len_ == 0 && odometer_.empty()) {
    // Emit the empty string, then start length 1.
    if (max_len_ == 0) {
      done_ = true;
    } else {
      current_len_ = 1;
      odometer_.assign(1, 0);
    }
    return std::string();
  }
  std::string out = render();
  // Advance the odometer; on wrap, grow the length.
  std::size_t i = odometer_.size();
  while (i > 0) {
    --i;
    if (++odometer_[i] < alphabet_.size()) break;
    odometer_[i] = 0;
    if (i == 0) {
      if (current_len_ == max_len_) {
        done_ = true;
      } else {
        ++current_len_;
        odometer_.assign(current_len_, 0);
      }
    }
  }
  return out;
}

std::string string_at_rank(const alphabet& a, std::uint64_t rank, unsigned max_len) {
  const std::uint64_t size = a.size();
  std::uint64_t level = 1;
  for (unsigned len = 0; len <= max_len; ++len) {
    if (rank < level) {
      // Decode rank as a base-`size` numeral of `len` digits.
      std::vector<std::uint32_t> digits(len, 0);
      std::uint64_t r = rank;
      for (std::size_t i = len; i > 0; --i) {
        digits[i - 1] = static_cast<std::uint32_t>(r % size);
        r /= size;
      }
      std::string out;
      for (std::uint32_t d : digits) out += a.symbol(d);
      return out;
    }
    rank -= level;
    level *= size;
  }
  throw index_out_of_range("string_at_rank: rank beyond the enumerated range");
}

}  // namespace ndr
