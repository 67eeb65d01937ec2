#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ndr/claims.hpp"
#include "ndr/estimation.hpp"
#include "ndr/rng.hpp"

namespace ndr {

// A joint distribution over claims-set outcomes. Marginals are containment
// probabilities; conditionals are ratios of marginals. Immutable once built.
class claim_joint {
 public:
  enum class provenance : std::uint8_t { exact, empirical };

  claim_joint() = default;
  // Validates: probabilities nonnegative, total at most 1 + 1e-9. Throws
  // invalid_weights.
  claim_joint(std::vector<std::pair<claims_set, double>> outcomes, provenance prov);

  const std::vector<std::pair<claims_set, double>>& outcomes() const { return outcomes_; }
  provenance source() const { return provenance_; }
  double total_mass() const { return total_; }

  // P(outcome contains every claim of c).
  double prob_contains(const claims_set& c) const;
  // P(outcome holds some claim on q).
  double occurrence(const question& q) const;
  // P(outcome contains c and holds some claim on q).
  double prob_question_with(const question& q, const claims_set& c) const;
  // P(outcome contains c and holds some claim on q with valence != t).
  double prob_not_t_with(const question& q, const claims_set& c) const;
  // True when no positive-mass outcome answers q with two different valences.
  bool single_valued(const question& q) const;

  // Distinct questions appearing anywhere in the support.
  std::vector<question> questions() const;

  static claim_joint from_exact_chain(const exact_chain_result& chain);
  // Tabulates final tapes as sets; provenance empirical.
  static claim_joint from_samples(const std::vector<claims_list>& finals);

  // Structured text: "joint exact|empirical" then one "outcome <p> <set>"
  // line per support point. load enforces normalization to 1e-9 and throws
  // invalid_weights; malformed lines throw parse_error.
  static claim_joint load(const std::string& path);
  void save(std::ostream& out) const;

 private:
  std::vector<std::pair<claims_set, double>> outcomes_;
  provenance provenance_ = provenance::exact;
  double total_ = 0.0;
};

// A joint over full valence assignments: every listed question is answered in
// every outcome (occurrence probability 1 by construction), with outcome
// weights drawn as floored unit exponentials, normalized. 4^m outcomes.
claim_joint random_assignment_joint(const std::vector<question>& questions, rng& r,
                                    double weight_floor = 0.0);

// ---------------------------------------------------------------------------
// Abduction: seeing q' proved lifts q, and seeing q proved lifts q'.

struct abduction_report {
  double occurrence_q = 0.0;
  double occurrence_q2 = 0.0;
  double p_t_q = 0.0;        // P(v=t | q)
  double p_t_q_given = 0.0;  // P(v=t | q, (q',t))
  double p_t_q2 = 0.0;       // P(v=t | q')
  double p_t_q2_given = 0.0; // P(v=t | q', (q,t))
  double premise_margin = 0.0;     // p_t_q_given - p_t_q
  double conclusion_margin = 0.0;  // p_t_q2_given - p_t_q2
  bool premise_holds = false;
  bool conclusion_holds = false;
  bool premise_flat = false;     // margin within tolerance of zero
  bool conclusion_flat = false;
  // The theorem: the two lifts agree in direction, equality included.
  bool consistent() const {
    return premise_holds == conclusion_holds && premise_flat == conclusion_flat;
  }
};

// Requires both questions answered with probability 1 under the joint
// (throws precedence_violated) and nonzero conditioning denominators (throws
// conditioning_undefined).
abduction_report check_abduction(const claim_joint& joint, const question& q, const question& q2,
                                 double tol = 1e-12);

// ---------------------------------------------------------------------------
// Proof paths: posterior growth over an ordered list of claims sets.

struct path_step {
  std::size_t index = 0;   // 1-based path number
  double posterior = 0.0;  // P(v=t | q, paths 1..index)
  double odds = 0.0;       // posterior odds after this path
  // Defined for index >= 2:
  double alpha = 0.0;    // P(path_i contained | paths 1..i-1, (q,t))
  double beta = 0.0;     // same given q answered with v != t
  double epsilon = 0.0;  // closed-form posterior multiplier from alpha/beta
};

struct proof_path_report {
  question q;
  std::vector<claims_set> paths;
  double base_posterior = 0.0;  // P(v=t | q)
  double base_odds = 0.0;
  std::vector<path_step> steps;  // one per path, in order

  bool all_paths_qualify(double tol = 1e-12) const;  // alpha_i >= beta_i for i >= 2
};

// Computes every coefficient from the joint by containment ratios. Requires
// a single-valued answer for q (throws invalid_config) and nonzero
// conditioning masses (throws zero_denominator).
proof_path_report proof_path_coefficients(const claim_joint& joint, const question& q,
                                          const std::vector<claims_set>& paths);

// First-path posterior times the product of the epsilon multipliers; equal to
// the directly conditioned posterior on exact joints.
double posterior_product(const proof_path_report& report);

enum class monotonicity : std::uint8_t { holds, violated, not_applicable };
std::string to_string(monotonicity m);

// not_applicable when some alpha_i < beta_i; otherwise holds iff the
// posterior trajectory never decreases (tolerance 1e-12).
monotonicity monotonicity_check(const proof_path_report& report);

// ---------------------------------------------------------------------------
// Randomized-joint suites. These are the machine checks: every trial builds
// an exact joint and asserts the identities against direct conditioning.

struct abduction_suite_report {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double max_margin_gap = 0.0;  // largest |premise - conclusion| sign gap found
  std::string first_failure;    // empty when clean
  bool passed() const { return failures == 0; }
};

abduction_suite_report run_abduction_suite(std::uint64_t trials, std::uint64_t seed);

struct proofpath_suite_report {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double max_product_error = 0.0;   // |posterior product - direct conditional|
  double max_ratio_error = 0.0;     // alpha/beta vs successive-odds ratio
  std::uint64_t epsilon_sign_violations = 0;
  std::uint64_t monotonicity_violations = 0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

proofpath_suite_report run_proofpath_suite(std::uint64_t trials, std::uint64_t seed);

// Plain-text report bodies used by the CLI and kept deterministic.
void write_abduction_report(std::ostream& out, const abduction_report& r, const question& q,
                            const question& q2);
void write_proof_path_report(std::ostream& out, const proof_path_report& r);

}  // namespace ndr
