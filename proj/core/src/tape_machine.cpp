#include "ndr/tape_machine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (in >> field) out.push_back(field);
  return out;
}

std::optional<head_move> move_from_string(const std::string& s) {
  if (s == "L") return head_move::left;
  if (s == "S") return head_move::stay;
  if (s == "R") return head_move::right;
  return std::nullopt;
}

char move_to_char(head_move m) {
  switch (m) {
    case head_move::left: return 'L';
    case head_move::stay: return 'S';
    case head_move::right: return 'R';
  }
  return '?';
}

}  // namespace

tape_machine::tape_machine(std::string name, std::vector<std::string> states, alphabet symbols,
                           std::string blank, std::string start, std::string halt,
                           std::vector<rule> rules)
    : name_(std::move(name)), states_(std::move(states)), alphabet_(std::move(symbols)) {
  if (alphabet_.size() < 3) {
    throw invalid_config("tape_machine " + name_ + ": alphabet needs at least 3 symbols");
  }
  std::set<std::string> state_names(states_.begin(), states_.end());
  if (state_names.size() != states_.size()) {
    throw invalid_config("tape_machine " + name_ + ": duplicate state name");
  }
  auto state_id = [&](const std::string& s) -> std::uint32_t {
    auto it = std::find(states_.begin(), states_.end(), s);
    if (it == states_.end()) {
      throw invalid_config("tape_machine " + name_ + ": unknown state '" + s + "'");
    }
    return static_cast<std::uint32_t>(it - states_.begin());
  };
  auto symbol_id = [&](const std::string& s) -> std::uint32_t {
    auto id = alphabet_.id_of(s);
    if (!id) throw invalid_config("tape_machine " + name_ + ": unknown symbol '" + s + "'");
    return *id;
  };

  auto blank_id = alphabet_.id_of(blank);
  if (!blank_id) throw invalid_config("tape_machine " + name_ + ": blank symbol not in alphabet");
  blank_ = *blank_id;
  start_ = state_id(start);
  halt_ = state_id(halt);

  rules_.assign(states_.size() * alphabet_.size(), {});

  // Explicit rules first; '*' reads fill the gaps afterwards so an explicit
  // rule always wins over a wildcard.
  std::vector<const rule*> wildcard_rules;
  for (const rule& r : rules) {
    const std::uint32_t s = state_id(r.state);
    if (s == halt_) {
      throw invalid_config("tape_machine " + name_ + ": the halt state cannot have rules");
    }
    if (r.read == "*") {
      wildcard_rules.push_back(&r);
      continue;
    }
    const std::uint32_t sym = symbol_id(r.read);
    auto& slot = rules_[s * alphabet_.size() + sym];
    if (!slot.empty()) {
      throw invalid_config("tape_machine " + name_ + ": duplicate rule for (" + r.state + ", " +
                           r.read + ")");
    }
    for (const auto& o : r.outcomes) {
      slot.push_back({state_id(o.next_state), o.write == "*" ? sym : symbol_id(o.write), o.move,
                      o.weight});
    }
  }
  for (const rule* r : wildcard_rules) {
    const std::uint32_t s = state_id(r->state);
    for (std::uint32_t sym = 0; sym < alphabet_.size(); ++sym) {
      auto& slot = rules_[s * alphabet_.size() + sym];
      if (!slot.empty()) continue;
      for (const auto& o : r->outcomes) {
        slot.push_back({state_id(o.next_state), o.write == "*" ? sym : symbol_id(o.write), o.move,
                        o.weight});
      }
    }
  }

  for (std::uint32_t s = 0; s < states_.size(); ++s) {
    if (s == halt_) continue;
    for (std::uint32_t sym = 0; sym < alphabet_.size(); ++sym) {
      const auto& slot = rules_[s * alphabet_.size() + sym];
      if (slot.empty()) {
        throw invalid_config("tape_machine " + name_ + ": no rule for (" + states_[s] + ", " +
                             alphabet_.symbol(sym) + ")");
      }
      double total = 0.0;
      for (const auto& o : slot) {
        if (o.weight < 0.0) {
          throw invalid_config("tape_machine " + name_ + ": negative rule weight");
        }
        total += o.weight;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw invalid_config("tape_machine " + name_ + ": outcome weights for (" + states_[s] +
                             ", " + alphabet_.symbol(sym) + ") sum to " + std::to_string(total));
      }
      if (slot.size() > 1) deterministic_ = false;
    }
  }
}

std::uint32_t machine_config::read(const tape_machine& m) const {
  auto it = cells.find(head);
  return it != cells.end() ? it->second : m.blank();
}

void machine_config::write(const tape_machine& m, std::int64_t pos, std::uint32_t symbol) {
  if (symbol == m.blank()) {
    cells.erase(pos);
  } else {
    cells[pos] = symbol;
  }
}

machine_config initial_config(const tape_machine& m, std::string_view input) {
  auto tokens = m.symbols().tokenize(input);
  if (!tokens) {
    throw symbol_not_in_alphabet("machine " + m.name() + ": input '" + std::string(input) +
                                 "' does not tokenize over the tape alphabet");
  }
  machine_config c;
  c.state = m.start_state();
  c.head = 0;
  for (std::size_t i = 0; i < tokens->size(); ++i) {
    c.write(m, static_cast<std::int64_t>(i), (*tokens)[i]);
  }
  return c;
}

machine_config step(const tape_machine& m, const machine_config& c, rng& r) {
  if (c.state == m.halt_state()) return c;  // halt states are fixed points
  const auto& slot = m.outcomes(c.state, c.read(m));
  const tm_outcome* chosen = &slot[0];
  if (slot.size() > 1) {
    double u = r.uniform01();
    for (const auto& o : slot) {
      if (u < o.weight) {
        chosen = &o;
        break;
      }
      u -= o.weight;
      chosen = &o;  // floating remainder lands on the last outcome
    }
  }
  machine_config next = c;
  next.state = chosen->next_state;
  next.write(m, c.head, chosen->write);
  next.head += static_cast<std::int64_t>(chosen->move);
  return next;
}

std::string output_at_halt(const tape_machine& m, const machine_config& c) {
  if (c.cells.find(c.head) == c.cells.end()) return "";  // head rests on a blank
  std::int64_t lo = c.head;
  while (c.cells.find(lo - 1) != c.cells.end()) --lo;
  std::int64_t hi = c.head;
  while (c.cells.find(hi + 1) != c.cells.end()) ++hi;
  std::string out;
  for (std::int64_t p = lo; p <= hi; ++p) out += m.symbols().symbol(c.cells.at(p));
  return out;
}

run_outcome run(const tape_machine& m, std::string_view input, std::uint64_t budget, rng& r) {
  machine_config c = initial_config(m, input);
  std::uint64_t steps = 0;
  while (c.state != m.halt_state()) {
    if (steps == budget) return budget_exhausted{steps};
    c = step(m, c, r);
    ++steps;
  }
  return halted{output_at_halt(m, c), steps};
}

run_outcome run(const tape_machine& m, std::string_view input, std::uint64_t budget) {
  if (!m.deterministic()) {
    throw invalid_config("run: machine " + m.name() + " is stochastic; pass an rng");
  }
  rng dummy(0);
  return run(m, input, budget, dummy);
}

halting_set_result halting_set(const tape_machine& m, unsigned max_len, std::uint64_t budget) {
  if (!m.deterministic()) {
    throw invalid_config("halting_set: machine " + m.name() + " is stochastic");
  }
  // Inputs range over the non-blank symbols.
  std::vector<std::string> input_symbols;
  for (std::uint32_t i = 0; i < m.symbols().size(); ++i) {
    if (i != m.blank()) input_symbols.push_back(m.symbols().symbol(i));
  }
  halting_set_result result;
  result.max_len = max_len;
  result.budget = budget;
  string_enumerator en(alphabet(input_symbols), max_len);
  while (auto s = en.next()) {
    if (std::holds_alternative<halted>(run(m, *s, budget))) result.strings.push_back(*s);
  }
  return result;
}

bool check_prefix_free(const std::vector<std::string>& strings) {
  for (std::size_t i = 0; i < strings.size(); ++i) {
    for (std::size_t j = 0; j < strings.size(); ++j) {
      if (i == j) continue;
      const std::string& a = strings[i];
      const std::string& b = strings[j];
      if (a.size() < b.size() && b.compare(0, a.size(), a) == 0) return false;
    }
  }
  return true;
}

coin_flip_result coin_flip_distribution(const tape_machine& m, unsigned max_len,
                                        std::uint64_t budget) {
  coin_flip_result result;
  result.halting = halting_set(m, max_len, budget);
  if (result.halting.strings.empty()) {
    throw invalid_config("coin_flip_distribution: machine " + m.name() +
                         " halts on no input within the budget");
  }
  if (!check_prefix_free(result.halting.strings)) {
    throw not_prefix_free("coin_flip_distribution: halting set of " + m.name() +
                          " is not prefix-free");
  }
  // Length in symbols, not bytes: each halting string is re-tokenized.
  std::vector<std::size_t> lengths;
  for (const auto& s : result.halting.strings) {
    auto tokens = m.symbols().tokenize(s);
    lengths.push_back(tokens->size());
  }
  double omega = 0.0;
  for (std::size_t len : lengths) omega += std::ldexp(1.0, -static_cast<int>(len));
  result.omega = omega;
  std::vector<std::string> sorted = result.halting.strings;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& s : sorted) {
    auto tokens = m.symbols().tokenize(s);
    double w = std::ldexp(1.0, -static_cast<int>(tokens->size()));
    result.probabilities.emplace_back(s, w / omega);
  }
  return result;
}

run_outcome emulate(const tape_machine& host, const string_codec& codec, std::string_view input,
                    std::uint64_t budget) {
  run_outcome out = run(host, codec.encode(input), budget);
  if (auto* h = std::get_if<halted>(&out)) {
    return halted{codec.decode(h->output), h->steps};
  }
  return out;
}

emulation_report check_emulation(const tape_machine& host, const tape_machine& target,
                                 const string_codec& codec, unsigned max_len,
                                 std::uint64_t budget) {
  emulation_report report;
  std::vector<std::string> input_symbols;
  for (std::uint32_t i = 0; i < target.symbols().size(); ++i) {
    if (i != target.blank()) input_symbols.push_back(target.symbols().symbol(i));
  }
  string_enumerator en(alphabet(input_symbols), max_len);
  while (auto s = en.next()) {
    ++report.inputs_checked;
    if (codec.decode(codec.encode(*s)) != *s) {
      report.codec_roundtrips = false;
      if (report.first_disagreement.empty()) {
        report.first_disagreement = "codec does not round-trip on '" + *s + "'";
      }
    }
    run_outcome direct = run(target, *s, budget);
    run_outcome via_host = emulate(host, codec, *s, budget);
    auto* dh = std::get_if<halted>(&direct);
    auto* vh = std::get_if<halted>(&via_host);
    if (dh == nullptr || vh == nullptr) continue;  // the contract binds only when both halt
    ++report.both_halted;
    if (dh->output != vh->output) {
      report.agreed = false;
      if (report.first_disagreement.empty()) {
        report.first_disagreement =
            "input '" + *s + "': target output '" + dh->output + "' vs decoded '" + vh->output + "'";
      }
    }
  }
  return report;
}

tape_machine tape_machine::parse(std::istream& in, const std::string& file_name) {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> symbols;
  std::string blank, start, halt;
  std::vector<rule> rules;

  std::string line;
  std::size_t line_no = 0;
  auto parse_outcome_fields = [&](const std::vector<std::string>& fields, std::size_t at,
                                  double weight) -> rule::outcome {
    // fields[at .. at+2] = next_state write move
    if (at + 3 > fields.size()) throw parse_error(file_name, line_no, "rule: truncated outcome");
    auto mv = move_from_string(fields[at + 2]);
    if (!mv) throw parse_error(file_name, line_no, "rule: move must be one of L S R");
    return rule::outcome{weight, fields[at], fields[at + 1], *mv};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    const std::string& key = fields[0];
    if (key == "machine") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "machine: expected one name");
      name = fields[1];
    } else if (key == "states") {
      if (fields.size() < 2) throw parse_error(file_name, line_no, "states: expected names");
      states.insert(states.end(), fields.begin() + 1, fields.end());
    } else if (key == "alphabet") {
      if (fields.size() < 2) throw parse_error(file_name, line_no, "alphabet: expected symbols");
      symbols.insert(symbols.end(), fields.begin() + 1, fields.end());
    } else if (key == "blank") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "blank: expected one symbol");
      blank = fields[1];
    } else if (key == "start") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "start: expected one state");
      start = fields[1];
    } else if (key == "halt") {
      if (fields.size() != 2) throw parse_error(file_name, line_no, "halt: expected one state");
      halt = fields[1];
    } else if (key == "rule") {
      // rule <state> <read> -> <next> <write> <move>
      if (fields.size() != 7 || fields[3] != "->") {
        throw parse_error(file_name, line_no, "rule: expected 'rule STATE READ -> NEXT WRITE MOVE'");
      }
      rule r{fields[1], fields[2], {parse_outcome_fields(fields, 4, 1.0)}};
      rules.push_back(std::move(r));
    } else if (key == "prule") {
      // prule <state> <read> -> <w> <next> <write> <move> | <w> ...
      if (fields.size() < 8 || fields[3] != "->") {
        throw parse_error(file_name, line_no,
                          "prule: expected 'prule STATE READ -> W NEXT WRITE MOVE | ...'");
      }
      rule r{fields[1], fields[2], {}};
      std::size_t at = 4;
      while (at < fields.size()) {
        double w = 0.0;
        try {
          w = std::stod(fields[at]);
        } catch (const std::exception&) {
          throw parse_error(file_name, line_no, "prule: weight '" + fields[at] + "' is not a number");
        }
        r.outcomes.push_back(parse_outcome_fields(fields, at + 1, w));
        at += 4;
        if (at < fields.size()) {
          if (fields[at] != "|") throw parse_error(file_name, line_no, "prule: expected '|'");
          ++at;
        }
      }
      rules.push_back(std::move(r));
    } else {
      throw parse_error(file_name, line_no, "unknown keyword '" + key + "'");
    }
  }
  if (name.empty()) throw parse_error(file_name, line_no, "missing 'machine <name>' line");
  try {
    return tape_machine(name, std::move(states), alphabet(symbols), blank, start, halt,
                        std::move(rules));
  } catch (const invalid_config& e) {
    throw parse_error(file_name, line_no, e.what());
  }
}

tape_machine tape_machine::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw parse_error(file.string(), 0, "cannot open file");
  return parse(in, file.string());
}

void tape_machine::save(std::ostream& out) const {
  out << "machine " << name_ << "\n";
  out << "states";
  for (const auto& s : states_) out << " " << s;
  out << "\n";
  out << "alphabet";
  for (const auto& s : alphabet_.symbols()) out << " " << s;
  out << "\n";
  out << "blank " << alphabet_.symbol(blank_) << "\n";
  out << "start " << states_[start_] << "\n";
  out << "halt " << states_[halt_] << "\n";
  for (std::uint32_t s = 0; s < states_.size(); ++s) {
    if (s == halt_) continue;
    for (std::uint32_t sym = 0; sym < alphabet_.size(); ++sym) {
      const auto& slot = rules_[s * alphabet_.size() + sym];
      if (slot.size() == 1) {
        const auto& o = slot[0];
        out << "rule " << states_[s] << " " << alphabet_.symbol(sym) << " -> "
            << states_[o.next_state] << " " << alphabet_.symbol(o.write) << " "
            << move_to_char(o.move) << "\n";
      } else {
        out << "prule " << states_[s] << " " << alphabet_.symbol(sym) << " ->";
        for (std::size_t i = 0; i < slot.size(); ++i) {
          const auto& o = slot[i];
          if (i > 0) out << " |";
          out << " " << o.weight << " " << states_[o.next_state] << " "
              << alphabet_.symbol(o.write) << " " << move_to_char(o.move);
        }
        out << "\n";
      }
    }
  }
}

}  // namespace ndr
