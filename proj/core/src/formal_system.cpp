#include "ndr/formal_system.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

// Symbol categories for the two grammar-based rule kinds. Values below 100
// are structural; 100 + d is the digit d.
enum : int {
  cat_variable = 0,
  cat_not = 1,
  cat_and = 2,
  cat_or = 3,
  cat_implies = 4,
  cat_lparen = 5,
  cat_rparen = 6,
  cat_plus = 7,
  cat_minus = 8,
  cat_eq = 9,
  cat_lt = 10,
  cat_gt = 11,
  cat_digit_base = 100,
};

constexpr const char* kNot = "~";
constexpr const char* kAnd = "∧";      // ∧
constexpr const char* kOr = "∨";       // ∨
constexpr const char* kImplies = "→";  // →

int truth_table_category(const std::string& sym) {
  if (sym == kNot) return cat_not;
  if (sym == kAnd) return cat_and;
  if (sym == kOr) return cat_or;
  if (sym == kImplies) return cat_implies;
  if (sym == "(") return cat_lparen;
  if (sym == ")") return cat_rparen;
  return cat_variable;
}

std::optional<int> arithmetic_category(const std::string& sym) {
  if (sym.size() == 1 && sym[0] >= '0' && sym[0] <= '9') return cat_digit_base + (sym[0] - '0');
  if (sym == "+") return cat_plus;
  if (sym == "-") return cat_minus;
  if (sym == "=") return cat_eq;
  if (sym == "<") return cat_lt;
  if (sym == ">") return cat_gt;
  if (sym == kNot) return cat_not;
  return std::nullopt;
}

// Recursive-descent propositional parser over category-tagged tokens.
// Grammar, loosest binding first:
//   formula := or ( '→' formula )?          right associative
//   or      := and ( '∨' and )*
//   and     := unary ( '∧' unary )*
//   unary   := '~' unary | variable | '(' formula ')'
struct prop_node {
  int kind;  // reuses the cat_* constants; cat_variable leaves store var_index
  int lhs = -1;
  int rhs = -1;
  int var_index = -1;
};

struct prop_parser {
  const std::vector<int>& cats;
  const std::vector<std::uint32_t>& tokens;
  std::vector<prop_node> nodes;
  std::vector<std::uint32_t> var_symbols;  // symbol id per variable index
  std::size_t pos = 0;
  bool failed = false;

  int var_index_for(std::uint32_t symbol_id) {
    for (std::size_t i = 0; i < var_symbols.size(); ++i) {
      if (var_symbols[i] == symbol_id) return static_cast<int>(i);
    }
    var_symbols.push_back(symbol_id);
    return static_cast<int>(var_symbols.size() - 1);
  }

  int category() const { return pos < tokens.size() ? cats[tokens[pos]] : -1; }

  int parse_formula() {
    int left = parse_or();
    if (failed) return -1;
    if (category() == cat_implies) {
      ++pos;
      int right = parse_formula();
      if (failed) return -1;
      nodes.push_back({cat_implies, left, right, -1});
      return static_cast<int>(nodes.size() - 1);
    }
    return left;
  }

  int parse_or() {
    int left = parse_and();
    while (!failed && category() == cat_or) {
      ++pos;
      int right = parse_and();
      if (failed) return -1;
      nodes.push_back({cat_or, left, right, -1});
      left = static_cast<int>(nodes.size() - 1);
    }
    return left;
  }

  int parse_and() {
    int left = parse_unary();
    while (!failed && category() == cat_and) {
      ++pos;
      int right = parse_unary();
      if (failed) return -1;
      nodes.push_back({cat_and, left, right, -1});
      left = static_cast<int>(nodes.size() - 1);
    }
    return left;
  }

  int parse_unary() {
    switch (category()) {
      case cat_not: {
        ++pos;
        int child = parse_unary();
        if (failed) return -1;
        nodes.push_back({cat_not, child, -1, -1});
        return static_cast<int>(nodes.size() - 1);
      }
      case cat_variable: {
        int vi = var_index_for(tokens[pos]);
        ++pos;
        nodes.push_back({cat_variable, -1, -1, vi});
        return static_cast<int>(nodes.size() - 1);
      }
      case cat_lparen: {
        ++pos;
        int inner = parse_formula();
        if (failed) return -1;
        if (category() != cat_rparen) {
          failed = true;
          return -1;
        }
        ++pos;
        return inner;
      }
      default:
        failed = true;
        return -1;
    }
  }
};

bool prop_eval(const std::vector<prop_node>& nodes, int root, std::uint32_t assignment) {
  const prop_node& n = nodes[root];
  switch (n.kind) {
    case cat_variable: return (assignment >> n.var_index) & 1u;
    case cat_not: return !prop_eval(nodes, n.lhs, assignment);
    case cat_and: return prop_eval(nodes, n.lhs, assignment) && prop_eval(nodes, n.rhs, assignment);
    case cat_or: return prop_eval(nodes, n.lhs, assignment) || prop_eval(nodes, n.rhs, assignment);
    case cat_implies: return !prop_eval(nodes, n.lhs, assignment) || prop_eval(nodes, n.rhs, assignment);
    default: return false;
  }
}

valence classify_truth_table(const std::vector<int>& cats, const std::vector<std::uint32_t>& tokens) {
  if (tokens.empty()) return valence::not_wff;
  prop_parser parser{cats, tokens, {}, {}, 0, false};
  int root = parser.parse_formula();
  if (parser.failed || parser.pos != tokens.size()) return valence::not_wff;
  const std::size_t nvars = parser.var_symbols.size();
  bool any_true = false;
  bool any_false = false;
  for (std::uint32_t a = 0; a < (1u << nvars); ++a) {
    if (prop_eval(parser.nodes, root, a)) {
      any_true = true;
    } else {
      any_false = true;
    }
    if (any_true && any_false) return valence::undecidable;
  }
  return any_true ? valence::theorem : valence::antitheorem;
}

// Arithmetic comparisons:
//   formula := '~' formula | expr cmp expr
//   expr    := digit ( ('+'|'-') digit )*
// evaluated over the integers. '~' flips theorem and antitheorem.
struct arith_parser {
  const std::vector<int>& cats;
  const std::vector<std::uint32_t>& tokens;
  std::size_t pos = 0;
  bool failed = false;

  int category() const { return pos < tokens.size() ? cats[tokens[pos]] : -1; }

  std::int64_t parse_expr() {
    int c = category();
    if (c < cat_digit_base) {
      failed = true;
      return 0;
    }
    std::int64_t value = c - cat_digit_base;
    ++pos;
    while (!failed) {
      int op = category();
      if (op != cat_plus && op != cat_minus) break;
      ++pos;
      int d = category();
      if (d < cat_digit_base) {
        failed = true;
        return 0;
      }
      value += (op == cat_plus) ? (d - cat_digit_base) : -(d - cat_digit_base);
      ++pos;
    }
    return value;
  }

  bool parse_relation() {
    std::int64_t lhs = parse_expr();
    if (failed) return false;
    int cmp = category();
    if (cmp != cat_eq && cmp != cat_lt && cmp != cat_gt) {
      failed = true;
      return false;
    }
    ++pos;
    std::int64_t rhs = parse_expr();
    if (failed) return false;
    switch (cmp) {
      case cat_eq: return lhs == rhs;
      case cat_lt: return lhs < rhs;
      default: return lhs > rhs;
    }
  }
};

valence classify_arithmetic(const std::vector<int>& cats, const std::vector<std::uint32_t>& tokens) {
  std::size_t negations = 0;
  std::size_t pos = 0;
  while (pos < tokens.size() && cats[tokens[pos]] == cat_not) {
    ++negations;
    ++pos;
  }
  std::vector<std::uint32_t> rest(tokens.begin() + pos, tokens.end());
  arith_parser parser{cats, rest, 0, false};
  if (rest.empty()) return valence::not_wff;
  bool truth = parser.parse_relation();
  if (parser.failed || parser.pos != rest.size()) return valence::not_wff;
  if (negations % 2 == 1) truth = !truth;
  return truth ? valence::theorem : valence::antitheorem;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

}  // namespace

std::string_view to_string(rule_kind k) {
  switch (k) {
    case rule_kind::truth_table: return "truth-table";
    case rule_kind::arithmetic_eval: return "arithmetic-eval";
    case rule_kind::explicit_table: return "explicit-table";
  }
  return "?";
}

void formal_system::validate() const {
  if (!valid_system_id(id_)) {
    throw invalid_config("formal_system: invalid system id '" + id_ + "'");
  }
  if (!alphabet_.contains(kNot)) {
    throw invalid_config("formal_system " + id_ + ": alphabet must contain the negation symbol ~");
  }
  switch (kind_) {
    case rule_kind::truth_table: {
      for (const char* sym : {kNot, kAnd, kOr, kImplies, "(", ")"}) {
        if (!alphabet_.contains(sym)) {
          throw invalid_config("formal_system " + id_ + ": truth-table alphabet must contain '" +
                               std::string(sym) + "'");
        }
      }
      std::size_t vars = 0;
      for (const auto& sym : alphabet_.symbols()) {
        if (truth_table_category(sym) == cat_variable) ++vars;
      }
      if (vars == 0) {
        throw invalid_config("formal_system " + id_ + ": truth-table alphabet needs a variable symbol");
      }
      if (vars > 16) {
        throw invalid_config("formal_system " + id_ + ": more than 16 variable symbols");
      }
      break;
    }
    case rule_kind::arithmetic_eval: {
      bool any_digit = false;
      for (const auto& sym : alphabet_.symbols()) {
        auto cat = arithmetic_category(sym);
        if (!cat) {
          throw invalid_config("formal_system " + id_ + ": symbol '" + sym +
                               "' has no arithmetic meaning");
        }
        if (*cat >= cat_digit_base) any_digit = true;
      }
      if (!any_digit || !alphabet_.contains("=")) {
        throw invalid_config("formal_system " + id_ + ": arithmetic alphabet needs digits and '='");
      }
      break;
    }
    case rule_kind::explicit_table: {
      for (const auto& [key, v] : table_) {
        (void)v;
        if (!alphabet_.tokenize(key)) {
          throw invalid_config("formal_system " + id_ + ": table entry '" + key +
                               "' does not tokenize over the alphabet");
        }
      }
      break;
    }
  }
}

formal_system formal_system::make_truth_table(std::string id, alphabet symbols) {
  formal_system fs;
  fs.id_ = std::move(id);
  fs.alphabet_ = std::move(symbols);
  fs.kind_ = rule_kind::truth_table;
  fs.symbol_category_.reserve(fs.alphabet_.size());
  for (const auto& sym : fs.alphabet_.symbols()) fs.symbol_category_.push_back(truth_table_category(sym));
  fs.validate();
  return fs;
}

formal_system formal_system::make_arithmetic(std::string id, alphabet symbols) {
  formal_system fs;
  fs.id_ = std::move(id);
  fs.alphabet_ = std::move(symbols);
  fs.kind_ = rule_kind::arithmetic_eval;
  fs.validate();
  fs.symbol_category_.reserve(fs.alphabet_.size());
  for (const auto& sym : fs.alphabet_.symbols()) fs.symbol_category_.push_back(*arithmetic_category(sym));
  return fs;
}

formal_system formal_system::make_explicit_table(std::string id, alphabet symbols,
                                                 std::map<std::string, valence> table,
                                                 valence default_valence) {
  formal_system fs;
  fs.id_ = std::move(id);
  fs.alphabet_ = std::move(symbols);
  fs.kind_ = rule_kind::explicit_table;
  fs.table_ = std::move(table);
  fs.default_valence_ = default_valence;
  fs.validate();
  return fs;
}

formal_system formal_system::make_prop() {
  return make_truth_table("PROP", alphabet({"p", "q", "r", kNot, kAnd, kOr, kImplies, "(", ")"}));
}

formal_system formal_system::make_modarith(int digit_bound) {
  if (digit_bound < 0 || digit_bound > 9) {
    throw invalid_config("make_modarith: digit bound must be in 0..9");
  }
  std::vector<std::string> symbols;
  for (int d = 0; d <= digit_bound; ++d) symbols.push_back(std::string(1, static_cast<char>('0' + d)));
  for (const char* op : {"+", "-", "=", "<", ">", kNot}) symbols.push_back(op);
  formal_system fs = make_arithmetic("MODARITH", alphabet(symbols));
  fs.digit_bound_ = digit_bound;
  return fs;
}

formal_system formal_system::make_synthu() {
  std::map<std::string, valence> table{
      {"0", valence::theorem},     {"~0", valence::antitheorem},
      {"1", valence::antitheorem}, {"~1", valence::theorem},
      {"u0", valence::undecidable}, {"u1", valence::undecidable},
      {"~u0", valence::undecidable}, {"~u1", valence::undecidable},
  };
  return make_explicit_table("SYNTHU", alphabet({"0", "1", "u", kNot}), std::move(table),
                             valence::not_wff);
}

valence formal_system::classify(std::string_view s) const {
  auto tokens = alphabet_.tokenize(s);
  if (!tokens) {
    throw symbol_not_in_alphabet("system " + id_ + ": string '" + std::string(s) +
                                 "' has a non-alphabet symbol at byte " +
                                 std::to_string(alphabet_.first_bad_position(s)));
  }
  switch (kind_) {
    case rule_kind::truth_table: return classify_truth_table(symbol_category_, *tokens);
    case rule_kind::arithmetic_eval: return classify_arithmetic(symbol_category_, *tokens);
    case rule_kind::explicit_table: {
      auto it = table_.find(std::string(s));
      return it != table_.end() ? it->second : default_valence_;
    }
  }
  return valence::not_wff;
}

formal_system formal_system::parse(std::istream& in, const std::string& file_name) {
  std::string id;
  std::vector<std::string> symbols;
  std::optional<rule_kind> kind;
  std::map<std::string, valence> table;
  valence default_valence = valence::not_wff;
  int digit_bound = 9;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    const std::string& key = fields[0];
    if (key == "system") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "system: expected one id");
      id = fields[1];
    } else if (key == "alphabet") {
      if (fields.size() < 2) throw parse_error(file_name, line_no, "alphabet: expected symbols");
      symbols.insert(symbols.end(), fields.begin() + 1, fields.end());
    } else if (key == "rule") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "rule: expected one kind");
      if (fields[1] == "truth-table") {
        kind = rule_kind::truth_table;
      } else if (fields[1] == "arithmetic-eval") {
        kind = rule_kind::arithmetic_eval;
      } else if (fields[1] == "explicit-table") {
        kind = rule_kind::explicit_table;
      } else {
        throw parse_error(file_name, line_no, "rule: unknown kind '" + fields[1] + "'");
      }
    } else if (key == "default") {
      if (fields.size() != 2 || fields[1].size() != 1) {
        throw parse_error(file_name, line_no, "default: expected one of t a n u");
      }
      auto v = valence_from_char(fields[1][0]);
      if (!v) throw parse_error(file_name, line_no, "default: expected one of t a n u");
      default_valence = *v;
    } else if (key == "entry") {
      if (fields.size() != 3 || fields[2].size() != 1) {
        throw parse_error(file_name, line_no, "entry: expected 'entry <string> <t|a|n|u>'");
      }
      auto v = valence_from_char(fields[2][0]);
      if (!v) throw parse_error(file_name, line_no, "entry: unknown valence '" + fields[2] + "'");
      table[fields[1]] = *v;
    } else if (key == "digit-bound") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "digit-bound: expected one value");
      try {
        digit_bound = std::stoi(fields[1]);
      } catch (const std::exception&) {
        throw parse_error(file_name, line_no, "digit-bound: not a number");
      }
    } else {
      throw parse_error(file_name, line_no, "unknown keyword '" + key + "'");
    }
  }
  if (id.empty()) throw parse_error(file_name, line_no, "missing 'system <id>' line");
  if (!kind) throw parse_error(file_name, line_no, "missing 'rule <kind>' line");
  try {
    switch (*kind) {
      case rule_kind::truth_table: return make_truth_table(id, alphabet(symbols));
      case rule_kind::arithmetic_eval: {
        formal_system fs = make_arithmetic(id, alphabet(symbols));
        fs.digit_bound_ = digit_bound;
        return fs;
      }
      case rule_kind::explicit_table:
        return make_explicit_table(id, alphabet(symbols), std::move(table), default_valence);
    }
  } catch (const invalid_config& e) {
    throw parse_error(file_name, line_no, e.what());
  }
  throw parse_error(file_name, line_no, "unreachable");
}

formal_system formal_system::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw parse_error(file.string(), 0, "cannot open file");
  return parse(in, file.string());
}

void formal_system::save(std::ostream& out) const {
  out << "system " << id_ << "\n";
  out << "alphabet";
  for (const auto& sym : alphabet_.symbols()) out << " " << sym;
  out << "\n";
  out << "rule " << to_string(kind_) << "\n";
  if (kind_ == rule_kind::arithmetic_eval) out << "digit-bound " << digit_bound_ << "\n";
  if (kind_ == rule_kind::explicit_table) {
    out << "default " << to_char(default_valence_) << "\n";
    for (const auto& [key, v] : table_) out << "entry " << key << " " << to_char(v) << "\n";
  }
}

std::vector<std::string> enumerate_strings(const formal_system& fs, unsigned max_len,
                                           std::uint64_t max_count) {
  const std::uint64_t total = count_strings(fs.symbols().size(), max_len);
  if (total > max_count) {
    throw invalid_config("enumerate_strings: " + std::to_string(total) +
                         " strings exceeds the cap of " + std::to_string(max_count));
  }
  std::vector<std::string> out;
  out.reserve(total);
  string_enumerator en(fs.symbols(), max_len);
  while (auto s = en.next()) out.push_back(std::move(*s));
  return out;
}

void system_set::add(formal_system fs) {
  auto id = fs.id();
  systems_[id] = std::make_shared<const formal_system>(std::move(fs));
}

bool system_set::has(std::string_view id) const {
  return systems_.find(std::string(id)) != systems_.end();
}

const formal_system& system_set::get(std::string_view id) const {
  auto it = systems_.find(std::string(id));
  if (it == systems_.end()) throw unknown_system("unknown formal system '" + std::string(id) + "'");
  return *it->second;
}

std::vector<std::string> system_set::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, fs] : systems_) {
    (void)fs;
    out.push_back(id);
  }
  return out;
}

valence system_set::classify(const question& q) const {
  return get(q.system).classify(q.formula);
}

bool system_set::is_wff(const question& q) const {
  return get(q.system).is_wff(q.formula);
}

system_set system_set::builtins() {
  system_set out;
  out.add(formal_system::make_prop());
  out.add(formal_system::make_modarith());
  out.add(formal_system::make_synthu());
  return out;
}

}  // namespace ndr
