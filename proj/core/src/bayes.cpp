#include "ndr/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "ndr/errors.hpp"

namespace ndr {

namespace {

constexpr double kMassTolerance = 1e-9;

bool set_answers_question(const claims_set& set, const question& q) {
  for (const auto& c : set.items()) {
    if (c.q == q) return true;
  }
  return false;
}

bool set_answers_not_t(const claims_set& set, const question& q) {
  for (const auto& c : set.items()) {
    if (c.q == q && c.v != valence::theorem) return true;
  }
  return false;
}

std::string render_set(const claims_set& set) {
  std::string enc = encode_set(set);
  return enc.empty() ? std::string("(empty)") : enc;
}

}  // namespace

claim_joint::claim_joint(std::vector<std::pair<claims_set, double>> outcomes, provenance prov)
    : provenance_(prov) {
  std::map<claims_set, double> merged;
  for (auto& [set, p] : outcomes) {
    if (!(p >= 0.0)) {
      throw invalid_weights("claim_joint: negative or NaN probability on outcome " +
                            render_set(set));
    }
    merged[std::move(set)] += p;
  }
  for (auto& [set, p] : merged) {
    total_ += p;
    outcomes_.emplace_back(set, p);
  }
  if (total_ > 1.0 + kMassTolerance) {
    throw invalid_weights("claim_joint: probabilities sum to " + std::to_string(total_) +
                          " > 1");
  }
}

double claim_joint::prob_contains(const claims_set& c) const {
  double sum = 0.0;
  for (const auto& [set, p] : outcomes_) {
    if (c.subset_of(set)) sum += p;
  }
  return sum;
}

double claim_joint::occurrence(const question& q) const {
  double sum = 0.0;
  for (const auto& [set, p] : outcomes_) {
    if (set_answers_question(set, q)) sum += p;
  }
  return sum;
}

double claim_joint::prob_question_with(const question& q, const claims_set& c) const {
  double sum = 0.0;
  for (const auto& [set, p] : outcomes_) {
    if (c.subset_of(set) && set_answers_question(set, q)) sum += p;
  }
  return sum;
}

double claim_joint::prob_not_t_with(const question& q, const claims_set& c) const {
  double sum = 0.0;
  for (const auto& [set, p] : outcomes_) {
    if (c.subset_of(set) && set_answers_not_t(set, q)) sum += p;
  }
  return sum;
}

bool claim_joint::single_valued(const question& q) const {
  for (const auto& [set, p] : outcomes_) {
    if (p <= 0.0) continue;
    int found = 0;
    for (const auto& c : set.items()) {
      if (c.q == q) ++found;
    }
    if (found > 1) return false;
  }
  return true;
}

std::vector<question> claim_joint::questions() const {
  std::vector<question> out;
  for (const auto& [set, p] : outcomes_) {
    (void)p;
    for (const auto& c : set.items()) out.push_back(c.q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

claim_joint claim_joint::from_exact_chain(const exact_chain_result& chain) {
  std::vector<std::pair<claims_set, double>> outcomes;
  outcomes.reserve(chain.outcomes.size());
  for (const auto& [list, p] : chain.outcomes) {
    outcomes.emplace_back(claims_set::from_list(list), p);
  }
  return claim_joint(std::move(outcomes), provenance::exact);
}

claim_joint claim_joint::from_samples(const std::vector<claims_list>& finals) {
  if (finals.empty()) throw invalid_weights("claim_joint: no samples");
  const double w = 1.0 / static_cast<double>(finals.size());
  std::vector<std::pair<claims_set, double>> outcomes;
  outcomes.reserve(finals.size());
  for (const auto& list : finals) {
    outcomes.emplace_back(claims_set::from_list(list), w);
  }
  return claim_joint(std::move(outcomes), provenance::empirical);
}

claim_joint claim_joint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open joint file");
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  provenance prov = provenance::exact;
  std::vector<std::pair<claims_set, double>> outcomes;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string keyword;
    if (!(fields >> keyword) || keyword[0] == '#') continue;
    if (keyword == "joint") {
      std::string kind;
      if (!(fields >> kind)) throw parse_error(path, lineno, "joint line needs a provenance");
      if (kind == "exact") {
        prov = provenance::exact;
      } else if (kind == "empirical") {
        prov = provenance::empirical;
      } else {
        throw parse_error(path, lineno, "unknown provenance '" + kind + "'");
      }
      saw_header = true;
    } else if (keyword == "outcome") {
      if (!saw_header) throw parse_error(path, lineno, "outcome before joint header");
      double p = 0.0;
      std::string enc;
      if (!(fields >> p >> enc)) {
        throw parse_error(path, lineno, "outcome line needs a probability and a claims set");
      }
      claims_set set;
      try {
        set = decode_set(enc);
      } catch (const error& e) {
        throw parse_error(path, lineno, e.what());
      }
      if (!(p >= 0.0)) throw parse_error(path, lineno, "negative probability");
      outcomes.emplace_back(std::move(set), p);
    } else {
      throw parse_error(path, lineno, "unknown keyword '" + keyword + "'");
    }
  }
  if (!saw_header) throw parse_error(path, lineno, "missing joint header");
  claim_joint joint(std::move(outcomes), prov);
  if (std::abs(joint.total_mass() - 1.0) > kMassTolerance) {
    throw invalid_weights(path + ": joint probabilities sum to " +
                          std::to_string(joint.total_mass()) + ", expected 1");
  }
  return joint;
}

void claim_joint::save(std::ostream& out) const {
  out << std::setprecision(17);
  out << "joint " << (provenance_ == provenance::exact ? "exact" : "empirical") << "\n";
  for (const auto& [set, p] : outcomes_) {
    out << "outcome " << p << " " << render_set(set) << "\n";
  }
}

claim_joint random_assignment_joint(const std::vector<question>& questions, rng& r,
                                    double weight_floor) {
  if (questions.empty()) throw invalid_config("random_assignment_joint: no questions");
  if (questions.size() > 10) {
    throw state_space_too_large("random_assignment_joint: too many questions");
  }
  const std::size_t m = questions.size();
  const std::size_t total = std::size_t{1} << (2 * m);
  std::vector<std::pair<claims_set, double>> outcomes;
  outcomes.reserve(total);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<claim> items;
    items.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      const valence v = all_valences[(idx >> (2 * j)) & 3];
      items.push_back(claim{questions[j], v});
    }
    const double w = -std::log(1.0 - r.uniform01()) + weight_floor;
    sum += w;
    outcomes.emplace_back(claims_set(std::move(items)), w);
  }
  for (auto& [set, w] : outcomes) {
    (void)set;
    w /= sum;
  }
  return claim_joint(std::move(outcomes), claim_joint::provenance::exact);
}

// ---------------------------------------------------------------------------
// Abduction.

abduction_report check_abduction(const claim_joint& joint, const question& q, const question& q2,
                                 double tol) {
  abduction_report rep;
  rep.occurrence_q = joint.occurrence(q);
  rep.occurrence_q2 = joint.occurrence(q2);
  if (rep.occurrence_q < 1.0 - kMassTolerance) {
    throw precedence_violated("check_abduction: " + encode_question(q) +
                              " occurs with probability " + std::to_string(rep.occurrence_q));
  }
  if (rep.occurrence_q2 < 1.0 - kMassTolerance) {
    throw precedence_violated("check_abduction: " + encode_question(q2) +
                              " occurs with probability " + std::to_string(rep.occurrence_q2));
  }
  const claims_set qt({claim{q, valence::theorem}});
  const claims_set q2t({claim{q2, valence::theorem}});
  const double p_qt = joint.prob_contains(qt);
  const double p_q2t = joint.prob_contains(q2t);
  const double p_both = joint.prob_contains(qt.union_with(q2t));

  rep.p_t_q = p_qt / rep.occurrence_q;
  rep.p_t_q2 = p_q2t / rep.occurrence_q2;

  const double denom_q_given = joint.prob_question_with(q, q2t);
  if (denom_q_given <= 0.0) {
    throw conditioning_undefined("check_abduction: conditioning event (" +
                                 encode_question(q2) + ", t) has zero probability");
  }
  rep.p_t_q_given = p_both / denom_q_given;

  const double denom_q2_given = joint.prob_question_with(q2, qt);
  if (denom_q2_given <= 0.0) {
    throw conditioning_undefined("check_abduction: conditioning event (" + encode_question(q) +
                                 ", t) has zero probability");
  }
  rep.p_t_q2_given = p_both / denom_q2_given;

  rep.premise_margin = rep.p_t_q_given - rep.p_t_q;
  rep.conclusion_margin = rep.p_t_q2_given - rep.p_t_q2;
  rep.premise_flat = std::abs(rep.premise_margin) <= tol;
  rep.conclusion_flat = std::abs(rep.conclusion_margin) <= tol;
  rep.premise_holds = !rep.premise_flat && rep.premise_margin > 0.0;
  rep.conclusion_holds = !rep.conclusion_flat && rep.conclusion_margin > 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Proof paths.

proof_path_report proof_path_coefficients(const claim_joint& joint, const question& q,
                                          const std::vector<claims_set>& paths) {
  if (!joint.single_valued(q)) {
    throw invalid_config("proof_path_coefficients: " + encode_question(q) +
                         " is answered with two valences in one outcome");
  }
  proof_path_report rep;
  rep.q = q;
  rep.paths = paths;

  const claims_set qt({claim{q, valence::theorem}});
  // Masses conditioned on the union of the first i paths, i = 0..n.
  claims_set cumulative;
  double qt_prev = joint.prob_contains(qt);
  double qnt_prev = joint.prob_not_t_with(q, cumulative);
  const double q_mass0 = joint.prob_question_with(q, cumulative);
  if (q_mass0 <= 0.0) {
    throw zero_denominator("proof_path_coefficients: " + encode_question(q) +
                           " never answered under the joint");
  }
  rep.base_posterior = qt_prev / q_mass0;
  rep.base_odds = qnt_prev > 0.0 ? qt_prev / qnt_prev
                                 : std::numeric_limits<double>::infinity();

  double odds_prev = rep.base_odds;
  for (std::size_t i = 1; i <= paths.size(); ++i) {
    cumulative = cumulative.union_with(paths[i - 1]);
    const double qt_mass = joint.prob_contains(qt.union_with(cumulative));
    const double qnt_mass = joint.prob_not_t_with(q, cumulative);
    const double q_mass = joint.prob_question_with(q, cumulative);
    if (q_mass <= 0.0) {
      throw zero_denominator("proof_path_coefficients: conditioning on paths 1.." +
                             std::to_string(i) + " has zero mass with " + encode_question(q));
    }
    path_step step;
    step.index = i;
    step.posterior = qt_mass / q_mass;
    step.odds = qnt_mass > 0.0 ? qt_mass / qnt_mass
                               : std::numeric_limits<double>::infinity();
    if (i >= 2) {
      if (qt_prev <= 0.0) {
        throw zero_denominator("proof_path_coefficients: alpha_" + std::to_string(i) +
                               " conditions on a zero-mass event");
      }
      if (qnt_prev <= 0.0) {
        throw zero_denominator("proof_path_coefficients: beta_" + std::to_string(i) +
                               " conditions on a zero-mass event");
      }
      step.alpha = qt_mass / qt_prev;
      step.beta = qnt_mass / qnt_prev;
      if (step.beta <= 0.0) {
        throw zero_denominator("proof_path_coefficients: beta_" + std::to_string(i) +
                               " is zero, epsilon undefined");
      }
      // Posterior multiplier in closed form from the likelihood ratio.
      const double ratio = step.alpha / step.beta;
      step.epsilon = ratio * (qnt_prev + qt_prev) / (qnt_prev + ratio * qt_prev);
    } else {
      step.alpha = std::numeric_limits<double>::quiet_NaN();
      step.beta = std::numeric_limits<double>::quiet_NaN();
      step.epsilon = std::numeric_limits<double>::quiet_NaN();
    }
    rep.steps.push_back(step);
    qt_prev = qt_mass;
    qnt_prev = qnt_mass;
    odds_prev = step.odds;
  }
  (void)odds_prev;
  return rep;
}

bool proof_path_report::all_paths_qualify(double tol) const {
  for (const auto& step : steps) {
    if (step.index < 2) continue;
    if (!(step.alpha >= step.beta - tol)) return false;
  }
  return true;
}

double posterior_product(const proof_path_report& report) {
  if (report.steps.empty()) return report.base_posterior;
  double acc = report.steps.front().posterior;
  for (std::size_t j = 1; j < report.steps.size(); ++j) {
    acc *= report.steps[j].epsilon;
  }
  return acc;
}

std::string to_string(monotonicity m) {
  switch (m) {
    case monotonicity::holds: return "holds";
    case monotonicity::violated: return "violated";
    case monotonicity::not_applicable: return "not-applicable";
  }
  return "?";
}

monotonicity monotonicity_check(const proof_path_report& report) {
  constexpr double tol = 1e-12;
  if (!report.all_paths_qualify(tol)) return monotonicity::not_applicable;
  for (std::size_t j = 1; j < report.steps.size(); ++j) {
    if (report.steps[j].posterior < report.steps[j - 1].posterior - tol) {
      return monotonicity::violated;
    }
  }
  return monotonicity::holds;
}

// ---------------------------------------------------------------------------
// Randomized suites.

namespace {

const std::vector<question>& suite_questions() {
  static const std::vector<question> pool = {
      question{"SYNTHU", "0"},  question{"SYNTHU", "1"},  question{"SYNTHU", "u0"},
      question{"SYNTHU", "u1"}, question{"SYNTHU", "~0"},
  };
  return pool;
}

int sign_class(double x, double tol) { return std::abs(x) <= tol ? 0 : (x > 0.0 ? 1 : -1); }

}  // namespace

abduction_suite_report run_abduction_suite(std::uint64_t trials, std::uint64_t seed) {
  abduction_suite_report rep;
  rep.trials = trials;
  const auto& pool = suite_questions();
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    rng r = rng::substream(seed, trial);
    const std::size_t m = 2 + static_cast<std::size_t>(r.below(3));
    std::vector<question> qs(pool.begin(), pool.begin() + m);
    claim_joint joint = random_assignment_joint(qs, r);
    abduction_report check = check_abduction(joint, qs[0], qs[1]);
    if (!check.consistent()) {
      ++rep.failures;
      const double gap = std::min(std::abs(check.premise_margin),
                                  std::abs(check.conclusion_margin));
      rep.max_margin_gap = std::max(rep.max_margin_gap, gap);
      if (rep.first_failure.empty()) {
        std::ostringstream oss;
        oss << std::setprecision(17) << "trial " << trial << ": premise margin "
            << check.premise_margin << ", conclusion margin " << check.conclusion_margin;
        rep.first_failure = oss.str();
      }
    }
  }
  return rep;
}

proofpath_suite_report run_proofpath_suite(std::uint64_t trials, std::uint64_t seed) {
  proofpath_suite_report rep;
  rep.trials = trials;
  const auto& pool = suite_questions();
  constexpr double tol = 1e-12;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    rng r = rng::substream(seed, trial);
    const std::size_t n_paths = 1 + static_cast<std::size_t>(r.below(4));
    std::vector<question> qs(pool.begin(), pool.begin() + (1 + n_paths));
    claim_joint joint = random_assignment_joint(qs, r, /*weight_floor=*/1e-2);
    std::vector<claims_set> paths;
    for (std::size_t i = 1; i <= n_paths; ++i) {
      paths.emplace_back(std::vector<claim>{claim{qs[i], valence::theorem}});
    }
    proof_path_report report = proof_path_coefficients(joint, qs[0], paths);
    bool failed = false;
    std::string why;

    // Product identity: first-path posterior times the multipliers equals the
    // directly conditioned posterior.
    const double product = posterior_product(report);
    const double direct = report.steps.back().posterior;
    const double err = std::abs(product - direct);
    rep.max_product_error = std::max(rep.max_product_error, err);
    if (err >= 1e-10) {
      failed = true;
      why = "product error " + std::to_string(err);
    }

    // Ratio identity: alpha/beta equals the factor by which the posterior
    // odds change when path i is added.
    double odds_prev = report.steps.front().odds;
    for (std::size_t j = 1; j < report.steps.size(); ++j) {
      const auto& step = report.steps[j];
      const double lhs = step.alpha / step.beta;
      const double rhs = step.odds / odds_prev;
      const double rel = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
      rep.max_ratio_error = std::max(rep.max_ratio_error, rel);
      if (rel >= tol) {
        failed = true;
        if (why.empty()) why = "ratio identity error " + std::to_string(rel);
      }
      // Sign law: epsilon sits on the same side of 1 as alpha does of beta.
      if (sign_class(step.epsilon - 1.0, tol) != sign_class(step.alpha - step.beta, tol)) {
        ++rep.epsilon_sign_violations;
        failed = true;
        if (why.empty()) why = "epsilon sign law violated";
      }
      odds_prev = step.odds;
    }

    // Strict growth whenever every multiplier strictly exceeds 1.
    bool all_above_one = report.steps.size() > 1;
    for (std::size_t j = 1; j < report.steps.size(); ++j) {
      if (!(report.steps[j].epsilon > 1.0 + tol)) all_above_one = false;
    }
    if (all_above_one) {
      for (std::size_t j = 1; j < report.steps.size(); ++j) {
        if (!(report.steps[j].posterior > report.steps[j - 1].posterior)) {
          ++rep.monotonicity_violations;
          failed = true;
          if (why.empty()) why = "trajectory not strictly increasing";
        }
      }
    }

    if (failed) {
      ++rep.failures;
      if (rep.first_failure.empty()) {
        rep.first_failure = "trial " + std::to_string(trial) + ": " + why;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Report writers.

void write_abduction_report(std::ostream& out, const abduction_report& r, const question& q,
                            const question& q2) {
  out << std::setprecision(12);
  out << "abduction check\n";
  out << "q: " << encode_question(q) << "\n";
  out << "q2: " << encode_question(q2) << "\n";
  out << "occurrence: " << r.occurrence_q << " " << r.occurrence_q2 << "\n";
  out << "p(t|q): " << r.p_t_q << "\n";
  out << "p(t|q,(q2,t)): " << r.p_t_q_given << "\n";
  out << "p(t|q2): " << r.p_t_q2 << "\n";
  out << "p(t|q2,(q,t)): " << r.p_t_q2_given << "\n";
  out << "premise: " << (r.premise_holds ? "holds" : (r.premise_flat ? "flat" : "fails"))
      << " margin " << r.premise_margin << "\n";
  out << "conclusion: "
      << (r.conclusion_holds ? "holds" : (r.conclusion_flat ? "flat" : "fails")) << " margin "
      << r.conclusion_margin << "\n";
  out << "consistent: " << (r.consistent() ? "yes" : "no") << "\n";
}

void write_proof_path_report(std::ostream& out, const proof_path_report& r) {
  out << std::setprecision(12);
  out << "proof path check\n";
  out << "q: " << encode_question(r.q) << "\n";
  out << "base posterior: " << r.base_posterior << "\n";
  for (const auto& step : r.steps) {
    out << "path " << step.index << ": " << render_set(r.paths[step.index - 1])
        << " posterior " << step.posterior;
    if (step.index >= 2) {
      out << " alpha " << step.alpha << " beta " << step.beta << " epsilon " << step.epsilon;
    }
    out << "\n";
  }
  out << "posterior product: " << posterior_product(r) << "\n";
  out << "monotonicity: " << to_string(monotonicity_check(r)) << "\n";
}

}  // namespace ndr
