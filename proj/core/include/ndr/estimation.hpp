#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ndr/claims.hpp"
#include "ndr/ndr_machine.hpp"
#include "ndr/stats.hpp"

namespace ndr {

// Key used for replicas whose claims tape is still shorter than the
// requested prefix length at the horizon.
inline constexpr const char* short_outcome_key = "(short)";
// Presentation form of the empty list key (stored internally as "").
inline constexpr const char* empty_outcome_key = "(empty)";

struct dist_entry {
  std::uint64_t count = 0;
  double estimate = 0.0;
  interval ci;
};

// Empirical distribution over canonical outcome keys from N replicas run to
// a fixed horizon. Counts are integers, so merging partial tabulations is
// exact and independent of threading.
class empirical_distribution {
 public:
  empirical_distribution() = default;
  empirical_distribution(std::map<std::string, std::uint64_t> counts, std::uint64_t replicas,
                         std::uint64_t horizon);

  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t replicas() const { return replicas_; }
  std::uint64_t horizon() const { return horizon_; }

  dist_entry entry(const std::string& key, double z = z_95) const;
  std::map<std::string, double> probabilities() const;
  double total_probability() const;  // always 1 when every replica tabulates

  void write_csv(std::ostream& out, const std::string& kind) const;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t replicas_ = 0;
  std::uint64_t horizon_ = 0;
};

struct run_options {
  std::uint64_t horizon = 0;   // iterations per replica
  std::uint64_t replicas = 0;  // N
  std::uint64_t seed = 0;      // master seed; replica i uses substream i
  unsigned threads = 1;
};

// Distribution of the first n claims of the tape after `horizon` iterations.
// Replicas with fewer than n claims tabulate the short outcome.
empirical_distribution simulate_pk(const ndr_config& cfg, const system_set& systems, unsigned n,
                                   const run_options& opt);

// Probability over four valences, stored in valence enum order.
struct valence_distribution {
  std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};
  double& operator[](valence v) { return p[index_of(v)]; }
  double operator[](valence v) const { return p[index_of(v)]; }
  double total() const { return p[0] + p[1] + p[2] + p[3]; }
};

// Empirical answer distribution for one question, from containment counts:
// numerator per valence = replicas whose tape holds (q,v); denominator =
// replicas whose tape holds a claim on q at all.
struct answer_estimate {
  question q;
  std::array<std::uint64_t, 4> counts{0, 0, 0, 0};
  std::uint64_t denominator = 0;
  std::uint64_t replicas = 0;
  std::uint64_t horizon = 0;
  valence_distribution probabilities() const;
  interval ci(valence v, double z = z_95) const;  // Wilson on counts[v]/denominator
};

// Fraction of replicas whose horizon tape contains every claim of c.
struct containment_estimate {
  std::uint64_t count = 0;
  std::uint64_t denominator = 0;  // replicas considered (all, or passing replicas)
  std::uint64_t replicas = 0;     // total replicas run
  std::uint64_t horizon = 0;
  double estimate = 0.0;
  interval ci;
};

containment_estimate estimate_claims_distribution(const ndr_config& cfg, const system_set& systems,
                                                  const claims_set& c, const run_options& opt);

// Throws question_never_answered when no replica ever answers q.
answer_estimate answer_distribution(const ndr_config& cfg, const system_set& systems,
                                    const question& q, const run_options& opt);

// Conditioned on the tape containing every claim of `conditioning`. With an
// empty set this is answer_distribution exactly, same counts and all. Throws
// conditioning_never_observed when the joint event never occurs.
answer_estimate generalized_answer_distribution(const ndr_config& cfg, const system_set& systems,
                                                const question& q, const claims_set& conditioning,
                                                const run_options& opt);

// Conditioning on passage: a replica qualifies when its claims tape equals
// `through` exactly at some iteration before the horizon (the blank initial
// tape counts, so an empty list qualifies every replica). Throws
// conditioning_list_never_reached when no replica passes.
containment_estimate list_conditioned_claims(const ndr_config& cfg, const system_set& systems,
                                             const claims_list& through, const claims_set& c,
                                             const run_options& opt);
answer_estimate list_conditioned_answer(const ndr_config& cfg, const system_set& systems,
                                        const claims_list& through, const question& q,
                                        const run_options& opt);

// Exhaustive probability propagation over reachable machine states, the
// brute-force oracle the Monte Carlo estimators are checked against. Throws
// state_space_too_large when the live state count passes max_states.
struct exact_chain_result {
  std::vector<std::pair<claims_list, double>> outcomes;  // final tape -> probability
  std::map<std::string, double> list_probabilities;      // same, keyed canonically
  // Filled when a passage target was given: mass that saw the target tape.
  std::vector<std::pair<claims_list, double>> passed_outcomes;
  double passage_probability = 0.0;
  std::uint64_t horizon = 0;
  std::size_t peak_states = 0;

  double prob_contains(const claims_set& c) const;
  double prob_contains_question(const claims_set& c, const question& q) const;
  valence_distribution answer(const question& q) const;  // throws zero_denominator
  valence_distribution generalized_answer(const question& q, const claims_set& c) const;
  // Prefix distribution over the first n claims, short outcomes keyed as in
  // simulate_pk.
  std::map<std::string, double> prefix_probabilities(unsigned n) const;
  // Conditioned on passage through the target given to exact_chain.
  double passed_prob_contains(const claims_set& c) const;
  valence_distribution passed_answer(const question& q) const;
};

exact_chain_result exact_chain(const ndr_config& cfg, const system_set& systems,
                               std::uint64_t horizon, std::size_t max_states,
                               const std::optional<claims_list>& passage_target = std::nullopt);

// Marginalization check: the prefix-n distribution against the prefix-(n+1)
// distribution summed over its last claim. On tabulations from the same
// replicas the discrepancy is an exact counting identity (zero) whenever no
// replica is short at n+1.
struct marginal_row {
  std::string prefix_key;
  double p_n = 0.0;
  double p_marginalized = 0.0;
  double discrepancy = 0.0;
  double sigma = 0.0;  // independent-sample pooled std dev of the difference
};
struct marginal_report {
  std::vector<marginal_row> rows;
  double max_discrepancy = 0.0;
  double short_mass_n = 0.0;
  double short_mass_n1 = 0.0;
  bool within(double tol) const { return max_discrepancy <= tol; }
  bool within_3_sigma() const;
};
marginal_report check_marginal_consistency(const empirical_distribution& dist_n,
                                           const empirical_distribution& dist_n1);

// Observed horizon lists that are not a proper prefix of another observed
// list. Always a statement about the truncated horizon, never the limit.
struct maximal_report {
  std::vector<claims_list> maximal;
  std::uint64_t horizon = 0;
  std::uint64_t replicas = 0;
  bool horizon_truncated = true;
};
maximal_report detect_maximal(const ndr_config& cfg, const system_set& systems,
                              const run_options& opt);

// Structured text report embedding everything needed to reproduce a run.
void write_report_header(std::ostream& out, const ndr_config& cfg, const run_options& opt);

}  // namespace ndr
