#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ndr/claims.hpp"
#include "ndr/formal_system.hpp"
#include "ndr/rng.hpp"

namespace ndr {

// Answer attempt distribution for one open question: with probability
// (1 - solve_rate) no answer; otherwise the oracle valence with probability
// (1 - noise_rate) and a uniform draw over the three incorrect valences with
// probability noise_rate.
struct answer_kernel {
  double solve_rate = 1.0;
  double noise_rate = 0.0;
  bool operator==(const answer_kernel&) const = default;
};

struct policy_spec {
  // One of: uniform, wff-biased, breakthrough-greedy, exhaustive, fixed-list.
  std::string kind = "uniform";
  // Emissions per iteration (breakthrough-greedy always emits at most one).
  std::uint32_t count = 1;
  // wff-biased: probability that a non-WFF draw is suppressed.
  double wff_weight = 1.0;
  // fixed-list: the questions, asked in order.
  std::vector<question> questions;
  // breakthrough-greedy: question -> the questions it would help answer.
  std::map<question, std::vector<question>> dependents;
  bool operator==(const policy_spec&) const = default;
};

struct ndr_config {
  std::vector<std::string> systems;  // which systems questions may name
  policy_spec policy;
  answer_kernel kernel;
  // Each claim is removed from the tape independently with this probability
  // at the end of every iteration.
  double removal_rate = 0.0;
  unsigned max_string_len = 12;
  // When set, a question that already has a claim on the tape is never asked
  // again, so claims lists never repeat a question.
  bool enforce_non_repeating = true;

  bool operator==(const ndr_config&) const = default;

  void validate(const system_set& systems_available) const;  // throws invalid_config
};

// The two tapes of a running machine. The questions tape Q holds open
// questions in emission order; the claims tape C holds claims in commitment
// order. A question never sits on both tapes at once.
class ndr_state {
 public:
  const std::vector<question>& open_questions() const { return open_; }
  const claims_list& claims() const { return claims_; }
  std::uint64_t iteration() const { return iteration_; }

  bool is_open(const question& q) const { return open_index_.count(q) > 0; }
  bool is_answered(const question& q) const { return answered_.count(q) > 0; }
  bool is_asked(const question& q) const { return is_open(q) || is_answered(q); }

  void push_open(const question& q);
  // Moves q from Q to the end of C with valence v.
  void commit(const question& q, valence v);
  void remove_claim(std::size_t index);
  void bump_iteration() { ++iteration_; }

  static ndr_state from_parts(std::vector<question> open, claims_list claims,
                              std::uint64_t iteration);

 private:
  std::vector<question> open_;
  claims_list claims_;
  std::uint64_t iteration_ = 0;
  std::set<question> open_index_;
  std::map<question, std::uint32_t> answered_;  // question -> claims on tape
};

enum class trace_kind : std::uint8_t { question_added, claim_added, claim_removed };

struct trace_event {
  std::uint64_t iteration;
  std::uint64_t sequence;  // order within the run
  trace_kind kind;
  question q;
  std::optional<valence> v;            // claim events
  std::optional<std::size_t> index;    // claim_removed: position at removal time
};

std::string trace_event_line(const trace_event& e);
trace_event parse_trace_event(std::string_view line);

// A question policy in two coupled forms: a sampler for Monte Carlo runs and
// the exact emission distribution for the chain oracle. The two must induce
// the same distribution; tests compare them through the estimators.
class question_policy {
 public:
  virtual ~question_policy() = default;
  virtual std::string kind() const = 0;
  // May emit nothing. Emissions are filtered by iterate's tape discipline.
  virtual std::vector<question> sample(const ndr_state& state, const ndr_config& cfg,
                                       const system_set& systems, rng& r) const = 0;
  // All possible emission batches with probabilities summing to 1.
  virtual std::vector<std::pair<std::vector<question>, double>> enumerate(
      const ndr_state& state, const ndr_config& cfg, const system_set& systems) const = 0;
};

std::unique_ptr<question_policy> make_policy(const ndr_config& cfg, const system_set& systems);

// One kernel attempt for a single question against its system's rule.
std::optional<valence> attempt_answer(const answer_kernel& kernel, const question& q,
                                      const formal_system& oracle, rng& r);

// Bundles config, oracle set and policy for a run. advance() mutates the
// state through one iteration: policy emissions join Q, every open question
// gets one kernel attempt, found answers move to the end of C in scan order,
// then each claim survives removal independently. Events are appended to
// *events when given.
class ndr_engine {
 public:
  ndr_engine(ndr_config cfg, const system_set& systems);

  const ndr_config& config() const { return cfg_; }
  const system_set& systems() const { return systems_; }
  const question_policy& policy() const { return *policy_; }

  void advance(ndr_state& state, rng& r, std::vector<trace_event>* events = nullptr) const;
  ndr_state run(std::uint64_t iterations, rng& r, std::vector<trace_event>* events = nullptr) const;

 private:
  ndr_config cfg_;
  system_set systems_;
  std::unique_ptr<question_policy> policy_;
};

// Pure single-step form: returns the advanced copy.
ndr_state iterate(const ndr_state& state, const ndr_config& cfg, const system_set& systems, rng& r,
                  std::vector<trace_event>* events = nullptr);

// Emission filter applied by advance(): drops duplicates within the batch,
// questions already open, and, with enforce_non_repeating, questions already
// answered. Without it an answered question may be re-asked; it is attempted
// this same iteration and never lingers on Q, which keeps the tapes disjoint.
std::vector<question> filter_emissions(const std::vector<question>& batch, const ndr_state& state,
                                       const ndr_config& cfg);

// Every claim on the list carries the valence its own system assigns.
bool is_mistake_free(const claims_list& claims, const system_set& systems);
// No two claims share a question.
bool is_non_repeating(const claims_list& claims);
// First n claims. Throws index_out_of_range when n > claims.size().
claims_list prefix(const claims_list& claims, std::size_t n);

}  // namespace ndr
