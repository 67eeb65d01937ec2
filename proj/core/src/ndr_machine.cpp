#include "ndr/ndr_machine.hpp"

#include <algorithm>
#include <sstream>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

std::uint64_t string_space(const system_set& systems, const std::string& system_id,
                           unsigned max_len) {
  return count_strings(systems.get(system_id).symbols().size(), max_len);
}

void append_event(std::vector<trace_event>* events, std::uint64_t iteration, trace_kind kind,
                  const question& q, std::optional<valence> v = std::nullopt,
                  std::optional<std::size_t> index = std::nullopt) {
  if (events == nullptr) return;
  events->push_back(trace_event{iteration, events->size(), kind, q, v, index});
}

}  // namespace

void ndr_config::validate(const system_set& available) const {
  if (systems.empty()) throw invalid_config("ndr_config: at least one system required");
  for (const auto& id : systems) {
    if (!available.has(id)) throw invalid_config("ndr_config: unknown system '" + id + "'");
  }
  auto check_rate = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw invalid_config(std::string("ndr_config: ") + name + " must lie in [0,1]");
    }
  };
  check_rate(kernel.solve_rate, "solve_rate");
  check_rate(kernel.noise_rate, "noise_rate");
  check_rate(removal_rate, "removal_rate");
  check_rate(policy.wff_weight, "wff_weight");
  if (max_string_len > 32) throw invalid_config("ndr_config: max_string_len above 32");
  if (policy.count > 64) throw invalid_config("ndr_config: policy count above 64");

  const std::string& kind = policy.kind;
  if (kind != "uniform" && kind != "wff-biased" && kind != "breakthrough-greedy" &&
      kind != "exhaustive" && kind != "fixed-list") {
    throw invalid_config("ndr_config: unknown question policy '" + kind + "'");
  }
  // The string space must be countable for the sampling policies.
  for (const auto& id : systems) (void)string_space(available, id, max_string_len);

  auto check_question = [&](const question& q, const char* where) {
    if (std::find(systems.begin(), systems.end(), q.system) == systems.end()) {
      throw invalid_config(std::string("ndr_config: ") + where + " names system '" + q.system +
                           "' outside the configured set");
    }
    available.get(q.system).classify(q.formula);  // throws on bad symbols
  };
  for (const auto& q : policy.questions) check_question(q, "fixed-list question");
  for (const auto& [q, deps] : policy.dependents) {
    check_question(q, "dependency key");
    for (const auto& d : deps) check_question(d, "dependency target");
  }
  if (kind == "breakthrough-greedy") {
    for (const auto& id : systems) {
      if (string_space(available, id, max_string_len) > 200000) {
        throw invalid_config("ndr_config: breakthrough-greedy needs a string space of at most "
                             "200000 per system; shrink max_string_len");
      }
    }
  }
}

void ndr_state::push_open(const question& q) {
  open_.push_back(q);
  open_index_.insert(q);
}

void ndr_state::commit(const question& q, valence v) {
  if (open_index_.erase(q) > 0) {
    open_.erase(std::find(open_.begin(), open_.end(), q));
  }
  claims_.push_back(claim{q, v});
  ++answered_[q];
}

void ndr_state::remove_claim(std::size_t index) {
  const question q = claims_[index].q;
  claims_.erase(claims_.begin() + static_cast<std::ptrdiff_t>(index));
  auto it = answered_.find(q);
  if (it != answered_.end() && --it->second == 0) answered_.erase(it);
}

ndr_state ndr_state::from_parts(std::vector<question> open, claims_list claims,
                                std::uint64_t iteration) {
  ndr_state s;
  s.open_ = std::move(open);
  s.claims_ = std::move(claims);
  s.iteration_ = iteration;
  for (const auto& q : s.open_) s.open_index_.insert(q);
  for (const auto& c : s.claims_) ++s.answered_[c.q];
  return s;
}

std::vector<question> filter_emissions(const std::vector<question>& batch, const ndr_state& state,
                                       const ndr_config& cfg) {
  std::vector<question> out;
  std::set<question> seen;
  for (const question& q : batch) {
    if (!seen.insert(q).second) continue;
    if (state.is_open(q)) continue;
    if (state.is_answered(q) && cfg.enforce_non_repeating) continue;
    out.push_back(q);
  }
  return out;
}

std::optional<valence> attempt_answer(const answer_kernel& kernel, const question& q,
                                      const formal_system& oracle, rng& r) {
  if (!r.bernoulli(kernel.solve_rate)) return std::nullopt;
  const valence truth = oracle.classify(q.formula);
  if (r.bernoulli(kernel.noise_rate)) {
    const auto wrong = wrong_valences(truth);
    return wrong[r.below(3)];
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Question policies.

namespace {

class uniform_policy : public question_policy {
 public:
  uniform_policy(const ndr_config& cfg, const system_set& systems) {
    for (const auto& id : cfg.systems) totals_.push_back(string_space(systems, id, cfg.max_string_len));
  }
  std::string kind() const override { return "uniform"; }

  std::vector<question> sample(const ndr_state&, const ndr_config& cfg, const system_set& systems,
                               rng& r) const override {
    std::vector<question> out;
    for (std::uint32_t i = 0; i < cfg.policy.count; ++i) {
      const std::size_t sys = cfg.systems.size() == 1
                                  ? 0
                                  : static_cast<std::size_t>(r.below(cfg.systems.size()));
      const std::uint64_t rank = r.below(totals_[sys]);
      out.push_back(question{cfg.systems[sys],
                             string_at_rank(systems.get(cfg.systems[sys]).symbols(), rank,
                                            cfg.max_string_len)});
    }
    return out;
  }

  std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state&, const ndr_config& cfg, const system_set& systems) const override {
    // Per-slot outcomes, then the product over independent slots.
    std::vector<std::pair<std::optional<question>, double>> slot;
    for (std::size_t sys = 0; sys < cfg.systems.size(); ++sys) {
      const double p = 1.0 / (static_cast<double>(cfg.systems.size()) *
                              static_cast<double>(totals_[sys]));
      if (totals_[sys] > 100000) {
        throw state_space_too_large("uniform policy: string space too large to enumerate");
      }
      string_enumerator en(systems.get(cfg.systems[sys]).symbols(), cfg.max_string_len);
      while (auto s = en.next()) {
        slot.emplace_back(question{cfg.systems[sys], std::move(*s)}, p);
      }
    }
    return product_slots(slot, cfg.policy.count);
  }

  static std::vector<std::pair<std::vector<question>, double>> product_slots(
      const std::vector<std::pair<std::optional<question>, double>>& slot, std::uint32_t count) {
    std::vector<std::pair<std::vector<question>, double>> batches{{{}, 1.0}};
    for (std::uint32_t i = 0; i < count; ++i) {
      if (batches.size() * slot.size() > 250000) {
        throw state_space_too_large("policy enumeration: too many emission batches");
      }
      std::vector<std::pair<std::vector<question>, double>> next;
      next.reserve(batches.size() * slot.size());
      for (const auto& [batch, pb] : batches) {
        for (const auto& [q, pq] : slot) {
          auto extended = batch;
          if (q) extended.push_back(*q);
          next.emplace_back(std::move(extended), pb * pq);
        }
      }
      batches = std::move(next);
    }
    return batches;
  }

 private:
  std::vector<std::uint64_t> totals_;
};

class wff_biased_policy : public question_policy {
 public:
  wff_biased_policy(const ndr_config& cfg, const system_set& systems) {
    for (const auto& id : cfg.systems) totals_.push_back(string_space(systems, id, cfg.max_string_len));
  }
  std::string kind() const override { return "wff-biased"; }

  std::vector<question> sample(const ndr_state&, const ndr_config& cfg, const system_set& systems,
                               rng& r) const override {
    std::vector<question> out;
    for (std::uint32_t i = 0; i < cfg.policy.count; ++i) {
      const std::size_t sys = cfg.systems.size() == 1
                                  ? 0
                                  : static_cast<std::size_t>(r.below(cfg.systems.size()));
      const std::uint64_t rank = r.below(totals_[sys]);
      question q{cfg.systems[sys],
                 string_at_rank(systems.get(cfg.systems[sys]).symbols(), rank, cfg.max_string_len)};
      if (!systems.is_wff(q) && r.bernoulli(cfg.policy.wff_weight)) continue;  // suppressed
      out.push_back(std::move(q));
    }
    return out;
  }

  std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state&, const ndr_config& cfg, const system_set& systems) const override {
    std::vector<std::pair<std::optional<question>, double>> slot;
    double suppressed = 0.0;
    for (std::size_t sys = 0; sys < cfg.systems.size(); ++sys) {
      if (totals_[sys] > 100000) {
        throw state_space_too_large("wff-biased policy: string space too large to enumerate");
      }
      const double p = 1.0 / (static_cast<double>(cfg.systems.size()) *
                              static_cast<double>(totals_[sys]));
      string_enumerator en(systems.get(cfg.systems[sys]).symbols(), cfg.max_string_len);
      while (auto s = en.next()) {
        question q{cfg.systems[sys], std::move(*s)};
        if (systems.is_wff(q)) {
          slot.emplace_back(std::move(q), p);
        } else {
          const double keep = p * (1.0 - cfg.policy.wff_weight);
          if (keep > 0.0) slot.emplace_back(std::move(q), keep);
          suppressed += p * cfg.policy.wff_weight;
        }
      }
    }
    if (suppressed > 0.0) slot.emplace_back(std::nullopt, suppressed);
    return uniform_policy::product_slots(slot, cfg.policy.count);
  }

 private:
  std::vector<std::uint64_t> totals_;
};

class exhaustive_policy : public question_policy {
 public:
  std::string kind() const override { return "exhaustive"; }

  std::vector<question> deterministic_batch(const ndr_state& state, const ndr_config& cfg,
                                            const system_set& systems) const {
    // Sweep the systems in order, each system's strings shortest first, and
    // emit the next `count` questions that have not been asked.
    std::vector<question> out;
    for (const auto& id : cfg.systems) {
      string_enumerator en(systems.get(id).symbols(), cfg.max_string_len);
      while (auto s = en.next()) {
        question q{id, std::move(*s)};
        if (state.is_asked(q)) continue;
        out.push_back(std::move(q));
        if (out.size() == cfg.policy.count) return out;
      }
    }
    return out;
  }

  std::vector<question> sample(const ndr_state& state, const ndr_config& cfg,
                               const system_set& systems, rng&) const override {
    return deterministic_batch(state, cfg, systems);
  }

  std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state& state, const ndr_config& cfg, const system_set& systems) const override {
    return {{deterministic_batch(state, cfg, systems), 1.0}};
  }
};

class fixed_list_policy : public question_policy {
 public:
  std::string kind() const override { return "fixed-list"; }

  std::vector<question> deterministic_batch(const ndr_state& state, const ndr_config& cfg) const {
    std::vector<question> out;
    for (const auto& q : cfg.policy.questions) {
      if (state.is_asked(q)) continue;
      if (std::find(out.begin(), out.end(), q) != out.end()) continue;
      out.push_back(q);
      if (out.size() == cfg.policy.count) break;
    }
    return out;
  }

  std::vector<question> sample(const ndr_state& state, const ndr_config& cfg, const system_set&,
                               rng&) const override {
    return deterministic_batch(state, cfg);
  }

  std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state& state, const ndr_config& cfg, const system_set&) const override {
    return {{deterministic_batch(state, cfg), 1.0}};
  }
};

class breakthrough_policy : public question_policy {
 public:
  std::string kind() const override { return "breakthrough-greedy"; }

  std::vector<question> deterministic_batch(const ndr_state& state, const ndr_config& cfg,
                                            const system_set& systems) const {
    // Candidate score: how many currently open questions it would help
    // answer, per the dependency table. Ties break toward the smallest
    // (system, formula) pair; emits at most one question.
    std::optional<question> best;
    std::size_t best_score = 0;
    for (const auto& id : cfg.systems) {
      string_enumerator en(systems.get(id).symbols(), cfg.max_string_len);
      while (auto s = en.next()) {
        question q{id, std::move(*s)};
        if (state.is_asked(q)) continue;
        std::size_t score = 0;
        auto it = cfg.policy.dependents.find(q);
        if (it != cfg.policy.dependents.end()) {
          for (const auto& dep : it->second) {
            if (state.is_open(dep)) ++score;
          }
        }
        if (!best || score > best_score || (score == best_score && q < *best)) {
          best = std::move(q);
          best_score = score;
        }
      }
    }
    if (!best) return {};
    return {*best};
  }

  std::vector<question> sample(const ndr_state& state, const ndr_config& cfg,
                               const system_set& systems, rng&) const override {
    return deterministic_batch(state, cfg, systems);
  }

  std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state& state, const ndr_config& cfg, const system_set& systems) const override {
    return {{deterministic_batch(state, cfg, systems), 1.0}};
  }
};

}  // namespace

std::unique_ptr<question_policy> make_policy(const ndr_config& cfg, const system_set& systems) {
  cfg.validate(systems);
  if (cfg.policy.kind == "uniform") return std::make_unique<uniform_policy>(cfg, systems);
  if (cfg.policy.kind == "wff-biased") return std::make_unique<wff_biased_policy>(cfg, systems);
  if (cfg.policy.kind == "exhaustive") return std::make_unique<exhaustive_policy>();
  if (cfg.policy.kind == "fixed-list") return std::make_unique<fixed_list_policy>();
  if (cfg.policy.kind == "breakthrough-greedy") return std::make_unique<breakthrough_policy>();
  throw invalid_config("make_policy: unknown kind '" + cfg.policy.kind + "'");
}

// ---------------------------------------------------------------------------
// Engine.

ndr_engine::ndr_engine(ndr_config cfg, const system_set& systems)
    : cfg_(std::move(cfg)), systems_(systems), policy_(make_policy(cfg_, systems_)) {}

void ndr_engine::advance(ndr_state& state, rng& r, std::vector<trace_event>* events) const {
  const std::uint64_t it = state.iteration() + 1;

  // 1. Ask. Accepted re-asks of answered questions (repeats allowed) do not
  // join Q; they are attempted once this iteration so Q and C stay disjoint.
  const auto emitted = policy_->sample(state, cfg_, systems_, r);
  std::vector<question> reasked;
  for (const question& q : filter_emissions(emitted, state, cfg_)) {
    append_event(events, it, trace_kind::question_added, q);
    if (state.is_answered(q)) {
      reasked.push_back(q);
    } else {
      state.push_open(q);
    }
  }

  // 2. Attempt an answer for every open question, in tape order.
  std::vector<claim> found;
  for (const question& q : state.open_questions()) {
    if (auto v = attempt_answer(cfg_.kernel, q, systems_.get(q.system), r)) {
      found.push_back(claim{q, *v});
    }
  }
  for (const question& q : reasked) {
    if (auto v = attempt_answer(cfg_.kernel, q, systems_.get(q.system), r)) {
      found.push_back(claim{q, *v});
    }
  }

  // 3. Commit found answers to the end of C in scan order.
  for (const claim& c : found) {
    state.commit(c.q, c.v);
    append_event(events, it, trace_kind::claim_added, c.q, c.v);
  }

  // 4. Independent removal. Draws ascend the tape; removals apply in
  // descending order so each event's index is valid when it is applied.
  if (cfg_.removal_rate > 0.0 && !state.claims().empty()) {
    std::vector<std::size_t> doomed;
    for (std::size_t i = 0; i < state.claims().size(); ++i) {
      if (r.bernoulli(cfg_.removal_rate)) doomed.push_back(i);
    }
    for (std::size_t k = doomed.size(); k > 0; --k) {
      const std::size_t i = doomed[k - 1];
      const claim c = state.claims()[i];
      append_event(events, it, trace_kind::claim_removed, c.q, c.v, i);
      state.remove_claim(i);
    }
  }

  state.bump_iteration();
}

ndr_state ndr_engine::run(std::uint64_t iterations, rng& r,
                          std::vector<trace_event>* events) const {
  ndr_state state;
  for (std::uint64_t i = 0; i < iterations; ++i) advance(state, r, events);
  return state;
}

ndr_state iterate(const ndr_state& state, const ndr_config& cfg, const system_set& systems, rng& r,
                  std::vector<trace_event>* events) {
  ndr_engine engine(cfg, systems);
  ndr_state next = state;
  engine.advance(next, r, events);
  return next;
}

// ---------------------------------------------------------------------------
// Predicates on claims lists.

bool is_mistake_free(const claims_list& claims, const system_set& systems) {
  for (const claim& c : claims) {
    if (systems.classify(c.q) != c.v) return false;
  }
  return true;
}

bool is_non_repeating(const claims_list& claims) { return distinct_questions(claims); }

claims_list prefix(const claims_list& claims, std::size_t n) {
  if (n > claims.size()) {
    throw index_out_of_range("prefix: " + std::to_string(n) + " > list length " +
                             std::to_string(claims.size()));
  }
  return claims_list(claims.begin(), claims.begin() + static_cast<std::ptrdiff_t>(n));
}

// ---------------------------------------------------------------------------
// Trace lines.

std::string trace_event_line(const trace_event& e) {
  std::ostringstream out;
  out << e.sequence << '\t' << e.iteration << '\t';
  switch (e.kind) {
    case trace_kind::question_added: out << "question_added"; break;
    case trace_kind::claim_added: out << "claim_added"; break;
    case trace_kind::claim_removed: out << "claim_removed"; break;
  }
  out << '\t' << e.q.system << '\t' << e.q.formula << '\t';
  out << (e.v ? std::string(1, to_char(*e.v)) : std::string("-"));
  out << '\t' << (e.index ? std::to_string(*e.index) : std::string("-"));
  return out.str();
}

trace_event parse_trace_event(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) tab = line.size();
    fields.emplace_back(line.substr(start, tab - start));
    if (tab == line.size()) break;
    start = tab + 1;
  }
  if (fields.size() != 7) throw parse_error("trace line: expected 7 tab-separated fields");
  trace_event e{};
  e.sequence = std::stoull(fields[0]);
  e.iteration = std::stoull(fields[1]);
  if (fields[2] == "question_added") {
    e.kind = trace_kind::question_added;
  } else if (fields[2] == "claim_added") {
    e.kind = trace_kind::claim_added;
  } else if (fields[2] == "claim_removed") {
    e.kind = trace_kind::claim_removed;
  } else {
    throw parse_error("trace line: unknown event kind '" + fields[2] + "'");
  }
  e.q = question{fields[3], fields[4]};
  if (fields[5] != "-") {
    auto v = valence_from_char(fields[5][0]);
    if (!v || fields[5].size() != 1) throw parse_error("trace line: bad valence field");
    e.v = *v;
  }
  if (fields[6] != "-") e.index = std::stoull(fields[6]);
  return e;
}

}  // namespace ndr
