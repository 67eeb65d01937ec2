#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ndr/bayes.hpp"
#include "ndr/errors.hpp"

using namespace ndr;

namespace {

const question q0{"SYNTHU", "0"};
const question q1{"SYNTHU", "1"};

claims_set both(const std::string& v0, const std::string& v1) {
  return decode_set("SYNTHU:0#" + v0 + "|SYNTHU:1#" + v1);
}

// Two coupled questions: matching valences carry 0.8 of the mass. Seeing one
// proved should lift both conditionals from 0.5 to 0.8.
claim_joint coupled_joint() {
  std::vector<std::pair<claims_set, double>> outcomes{
      {both("t", "t"), 0.4},
      {both("t", "a"), 0.1},
      {both("a", "t"), 0.1},
      {both("a", "a"), 0.4},
  };
  return claim_joint(std::move(outcomes), claim_joint::provenance::exact);
}

claim_joint independent_joint() {
  std::vector<std::pair<claims_set, double>> outcomes{
      {both("t", "t"), 0.25},
      {both("t", "a"), 0.25},
      {both("a", "t"), 0.25},
      {both("a", "a"), 0.25},
  };
  return claim_joint(std::move(outcomes), claim_joint::provenance::exact);
}

}  // namespace

TEST_CASE("joint validation rejects negative and oversized weights") {
  CHECK_THROWS_AS(claim_joint({{both("t", "t"), -0.1}, {both("a", "a"), 1.1}},
                              claim_joint::provenance::exact),
                  invalid_weights);
  CHECK_THROWS_AS(claim_joint({{both("t", "t"), 0.9}, {both("a", "a"), 0.2}},
                              claim_joint::provenance::exact),
                  invalid_weights);
}

TEST_CASE("joint marginals, occurrence and single-valuedness") {
  const claim_joint j = coupled_joint();
  CHECK(j.total_mass() == doctest::Approx(1.0));
  CHECK(j.occurrence(q0) == doctest::Approx(1.0));
  CHECK(j.occurrence(question{"SYNTHU", "u"}) == doctest::Approx(0.0));
  CHECK(j.prob_contains(decode_set("SYNTHU:0#t")) == doctest::Approx(0.5));
  CHECK(j.prob_contains(both("t", "t")) == doctest::Approx(0.4));
  CHECK(j.prob_question_with(q0, decode_set("SYNTHU:1#t")) == doctest::Approx(0.5));
  CHECK(j.prob_not_t_with(q0, claims_set{}) == doctest::Approx(0.5));
  // Every outcome answers q0 exactly once, so the joint is single-valued for
  // q0 even though different outcomes disagree about the valence.
  CHECK(j.single_valued(q0));

  const claim_joint point({{both("t", "t"), 1.0}}, claim_joint::provenance::exact);
  CHECK(point.single_valued(q0));
  const claim_joint contradictory({{decode_set("SYNTHU:0#t|SYNTHU:0#a"), 1.0}},
                                  claim_joint::provenance::exact);
  CHECK_FALSE(contradictory.single_valued(q0));
  CHECK(j.questions() == std::vector<question>{q0, q1});
}

TEST_CASE("joint save and load round-trip, bad files produce typed errors") {
  const claim_joint j = coupled_joint();
  const std::string path = "roundtrip.joint";
  {
    std::ofstream out(path);
    j.save(out);
  }
  const claim_joint back = claim_joint::load(path);
  REQUIRE(back.outcomes().size() == j.outcomes().size());
  CHECK(back.source() == claim_joint::provenance::exact);
  for (std::size_t i = 0; i < j.outcomes().size(); ++i) {
    CHECK(back.outcomes()[i].first == j.outcomes()[i].first);
    CHECK(back.outcomes()[i].second == doctest::Approx(j.outcomes()[i].second).epsilon(1e-12));
  }

  {
    std::ofstream out("under.joint");
    out << "joint exact\noutcome 0.5 SYNTHU:0#t\noutcome 0.4 SYNTHU:0#a\n";
  }
  CHECK_THROWS_AS((void)claim_joint::load("under.joint"), invalid_weights);

  {
    std::ofstream out("garbled.joint");
    out << "joint exact\noutcome notanumber SYNTHU:0#t\n";
  }
  CHECK_THROWS_AS((void)claim_joint::load("garbled.joint"), parse_error);
}

TEST_CASE("abduction on the coupled pair lifts both directions to 0.8") {
  const abduction_report r = check_abduction(coupled_joint(), q0, q1);
  CHECK(r.p_t_q == doctest::Approx(0.5));
  CHECK(r.p_t_q_given == doctest::Approx(0.8));
  CHECK(r.p_t_q2 == doctest::Approx(0.5));
  CHECK(r.p_t_q2_given == doctest::Approx(0.8));
  CHECK(r.premise_holds);
  CHECK(r.conclusion_holds);
  CHECK(r.consistent());
}

TEST_CASE("abduction on an independent joint is flat on both sides") {
  const abduction_report r = check_abduction(independent_joint(), q0, q1);
  CHECK(r.premise_flat);
  CHECK(r.conclusion_flat);
  CHECK(r.premise_margin == doctest::Approx(0.0));
  CHECK(r.conclusion_margin == doctest::Approx(0.0));
  CHECK(r.consistent());
}

TEST_CASE("abduction requires both questions answered with probability one") {
  // q1 is missing from half the mass, so its occurrence is 0.5.
  const claim_joint partial(
      {{both("t", "t"), 0.5}, {decode_set("SYNTHU:0#a"), 0.5}},
      claim_joint::provenance::exact);
  CHECK_THROWS_AS((void)check_abduction(partial, q0, q1), precedence_violated);
}

TEST_CASE("abduction needs a nonzero conditioning denominator") {
  // q1 is answered everywhere but never with t, so conditioning on (q1,t)
  // has probability zero.
  const claim_joint never_t(
      {{both("t", "a"), 0.5}, {both("a", "a"), 0.5}},
      claim_joint::provenance::exact);
  CHECK_THROWS_AS((void)check_abduction(never_t, q0, q1), conditioning_undefined);
}

TEST_CASE("random assignment joints answer every question in every outcome") {
  rng r(99);
  const std::vector<question> qs{q0, q1, question{"SYNTHU", "u0"}};
  const claim_joint j = random_assignment_joint(qs, r);
  CHECK(j.outcomes().size() == 64);  // 4^3 valence assignments
  CHECK(j.total_mass() == doctest::Approx(1.0));
  for (const question& q : qs) {
    CHECK(j.occurrence(q) == doctest::Approx(1.0));
    // Each outcome assigns exactly one valence per question.
    CHECK(j.single_valued(q));
  }
  for (const auto& [outcome, p] : j.outcomes()) {
    CHECK(p >= 0.0);
    CHECK(outcome.size() == 3);
  }
}

TEST_CASE("proof path coefficients reproduce direct conditioning step by step") {
  const claim_joint j = coupled_joint();
  const std::vector<claims_set> paths{decode_set("SYNTHU:1#t")};
  const proof_path_report rep = proof_path_coefficients(j, q0, paths);
  CHECK(rep.base_posterior == doctest::Approx(0.5));
  CHECK(rep.base_odds == doctest::Approx(1.0));
  REQUIRE(rep.steps.size() == 1);
  CHECK(rep.steps[0].posterior == doctest::Approx(0.8));
  CHECK(rep.steps[0].odds == doctest::Approx(4.0));
  CHECK(posterior_product(rep) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(monotonicity_check(rep) == monotonicity::holds);
}

TEST_CASE("two conditionally independent proof paths multiply their odds") {
  // Three questions: q0 the target and two "proof" questions whose theorem
  // valences are conditionally independent given q0's valence. Each proof
  // question reads t with probability 0.9 when q0 is t and 0.5 otherwise.
  std::vector<std::pair<claims_set, double>> outcomes;
  const double prior_t = 0.5;
  for (const char* v0 : {"t", "a"}) {
    const bool target_t = std::string(v0) == "t";
    const double base = target_t ? prior_t : 1.0 - prior_t;
    const double hit = target_t ? 0.9 : 0.5;
    for (const char* va : {"t", "a"}) {
      for (const char* vb : {"t", "a"}) {
        const double p_a = std::string(va) == "t" ? hit : 1.0 - hit;
        const double p_b = std::string(vb) == "t" ? hit : 1.0 - hit;
        outcomes.emplace_back(decode_set("SYNTHU:0#" + std::string(v0) + "|SYNTHU:u0#" + va +
                                         "|SYNTHU:u1#" + vb),
                              base * p_a * p_b);
      }
    }
  }
  const claim_joint j(std::move(outcomes), claim_joint::provenance::exact);
  const std::vector<claims_set> paths{decode_set("SYNTHU:u0#t"), decode_set("SYNTHU:u1#t")};
  const proof_path_report rep = proof_path_coefficients(j, q0, paths);
  REQUIRE(rep.steps.size() == 2);

  // After one path: odds 1 * (0.9/0.5) = 1.8. After both: 1.8 * 1.8 = 3.24.
  CHECK(rep.steps[0].odds == doctest::Approx(1.8).epsilon(1e-12));
  CHECK(rep.steps[1].odds == doctest::Approx(3.24).epsilon(1e-12));
  // Conditional independence makes the second-step coefficients equal to the
  // single-path likelihoods.
  CHECK(rep.steps[1].alpha == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(rep.steps[1].beta == doctest::Approx(0.5).epsilon(1e-12));
  // alpha/beta equals the ratio of successive odds.
  CHECK(rep.steps[1].alpha / rep.steps[1].beta ==
        doctest::Approx(rep.steps[1].odds / rep.steps[0].odds).epsilon(1e-12));

  // The product form reproduces conditioning on both paths directly.
  const double direct = 0.5 * 0.9 * 0.9 / (0.5 * 0.9 * 0.9 + 0.5 * 0.5 * 0.5);
  CHECK(posterior_product(rep) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(rep.steps[1].posterior == doctest::Approx(direct).epsilon(1e-12));
  CHECK(rep.all_paths_qualify());
  CHECK(monotonicity_check(rep) == monotonicity::holds);

  // Epsilon multipliers carry the posterior from step to step.
  CHECK(rep.steps[0].posterior * rep.steps[1].epsilon ==
        doctest::Approx(rep.steps[1].posterior).epsilon(1e-12));
}

TEST_CASE("an eroding second path voids the growth guarantee") {
  // pa is independent of the target; pb reads t more often when q0 is NOT a
  // theorem. The second step then has alpha < beta and the qualification
  // fails, while the product identity still reproduces direct conditioning.
  std::vector<std::pair<claims_set, double>> outcomes;
  for (const char* v0 : {"t", "a"}) {
    const bool target_t = std::string(v0) == "t";
    const double hit_b = target_t ? 0.2 : 0.8;  // anti-correlated
    for (const char* va : {"t", "a"}) {
      for (const char* vb : {"t", "a"}) {
        const double p_a = 0.5;
        const double p_b = std::string(vb) == "t" ? hit_b : 1.0 - hit_b;
        outcomes.emplace_back(decode_set("SYNTHU:0#" + std::string(v0) + "|SYNTHU:u0#" + va +
                                         "|SYNTHU:u1#" + vb),
                              0.5 * p_a * p_b);
      }
    }
  }
  const claim_joint j(std::move(outcomes), claim_joint::provenance::exact);
  const std::vector<claims_set> paths{decode_set("SYNTHU:u0#t"), decode_set("SYNTHU:u1#t")};
  const proof_path_report rep = proof_path_coefficients(j, q0, paths);
  REQUIRE(rep.steps.size() == 2);
  CHECK(rep.steps[0].posterior == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.steps[1].posterior == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.steps[1].alpha == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(rep.steps[1].beta == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_FALSE(rep.all_paths_qualify());
  CHECK(monotonicity_check(rep) == monotonicity::not_applicable);
  // Direct conditioning: 0.5*0.5*0.2 / (0.5*0.5*0.2 + 0.5*0.5*0.8) = 0.2.
  CHECK(posterior_product(rep) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("proof paths demand a single-valued target") {
  // One positive-mass outcome answers q0 with two valences at once, which
  // makes every conditional on q0's valence meaningless.
  const claim_joint contradictory(
      {{decode_set("SYNTHU:0#t|SYNTHU:0#a"), 0.5}, {both("t", "t"), 0.5}},
      claim_joint::provenance::exact);
  CHECK_THROWS_AS(
      (void)proof_path_coefficients(contradictory, q0, {decode_set("SYNTHU:1#t")}),
      invalid_config);
}

TEST_CASE("zero-mass conditioning in a path chain is a typed error") {
  const claim_joint j = coupled_joint();
  const std::vector<claims_set> paths{decode_set("SYNTHU:1#u")};  // never occurs
  CHECK_THROWS_AS((void)proof_path_coefficients(j, q0, paths), zero_denominator);
}

TEST_CASE("abduction suite passes over randomized exact joints") {
  const abduction_suite_report rep = run_abduction_suite(500, 20260219);
  CHECK(rep.trials == 500);
  CHECK(rep.failures == 0);
  CHECK(rep.passed());
  CHECK(rep.first_failure.empty());
}

TEST_CASE("proof path suite validates the product and ratio identities") {
  const proofpath_suite_report rep = run_proofpath_suite(200, 77777);
  CHECK(rep.trials == 200);
  CHECK(rep.failures == 0);
  CHECK(rep.max_product_error < 1e-10);
  CHECK(rep.max_ratio_error < 1e-10);
  CHECK(rep.epsilon_sign_violations == 0);
  CHECK(rep.passed());
}

TEST_CASE("suites are deterministic in their seed") {
  const abduction_suite_report a1 = run_abduction_suite(50, 5);
  const abduction_suite_report a2 = run_abduction_suite(50, 5);
  CHECK(a1.max_margin_gap == a2.max_margin_gap);
  const proofpath_suite_report p1 = run_proofpath_suite(50, 5);
  const proofpath_suite_report p2 = run_proofpath_suite(50, 5);
  CHECK(p1.max_product_error == p2.max_product_error);
  CHECK(p1.max_ratio_error == p2.max_ratio_error);
}

TEST_CASE("joints built from an exact chain agree with the chain's marginals") {
  const system_set systems = system_set::builtins();
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "fixed-list";
  cfg.policy.count = 1;
  cfg.policy.questions = {q0, q1};
  cfg.max_string_len = 2;
  cfg.kernel = {1.0, 0.3};
  const exact_chain_result chain = exact_chain(cfg, systems, 4, 100000);
  const claim_joint j = claim_joint::from_exact_chain(chain);
  CHECK(j.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  const claims_set probe = decode_set("SYNTHU:0#t");
  CHECK(j.prob_contains(probe) == doctest::Approx(chain.prob_contains(probe)).epsilon(1e-12));

  const std::vector<claims_list> finals{{{q0, valence::theorem}},
                                        {{q0, valence::theorem}},
                                        {{q0, valence::antitheorem}}};
  const claim_joint emp = claim_joint::from_samples(finals);
  CHECK(emp.source() == claim_joint::provenance::empirical);
  CHECK(emp.prob_contains(probe) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("report writers emit stable text") {
  const abduction_report r = check_abduction(coupled_joint(), q0, q1);
  std::ostringstream out1, out2;
  write_abduction_report(out1, r, q0, q1);
  write_abduction_report(out2, r, q0, q1);
  CHECK(out1.str() == out2.str());
  CHECK(out1.str().find("SYNTHU:0") != std::string::npos);

  const proof_path_report rep =
      proof_path_coefficients(coupled_joint(), q0, {decode_set("SYNTHU:1#t")});
  std::ostringstream out3;
  write_proof_path_report(out3, rep);
  CHECK(out3.str().find("posterior") != std::string::npos);
}
