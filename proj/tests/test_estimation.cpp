#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "ndr/errors.hpp"
#include "ndr/estimation.hpp"
#include "ndr/stats.hpp"

using namespace ndr;

namespace {

const question q0{"SYNTHU", "0"};
const question q1{"SYNTHU", "1"};

ndr_config fixed_list_config(std::vector<question> qs) {
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "fixed-list";
  cfg.policy.count = 1;
  cfg.policy.questions = std::move(qs);
  cfg.max_string_len = 2;
  return cfg;
}

double sum_probabilities(const std::map<std::string, double>& p) {
  double s = 0.0;
  for (const auto& [k, v] : p) {
    (void)k;
    s += v;
  }
  return s;
}

}  // namespace

TEST_CASE("deterministic machine gives a point-mass prefix distribution") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {1.0, 0.0};
  const empirical_distribution dist = simulate_pk(cfg, systems, 2, {4, 50, 9, 1});
  REQUIRE(dist.replicas() == 50);
  const std::string key = "SYNTHU:0#t|SYNTHU:1#a";
  CHECK(dist.counts().at(key) == 50);
  CHECK(dist.entry(key).estimate == doctest::Approx(1.0));
  CHECK(dist.total_probability() == doctest::Approx(1.0));
}

TEST_CASE("replicas shorter than the prefix tabulate the short outcome") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {0.0, 0.0};  // nothing is ever answered
  const empirical_distribution dist = simulate_pk(cfg, systems, 1, {3, 20, 5, 1});
  CHECK(dist.counts().at(short_outcome_key) == 20);
}

TEST_CASE("a single replica tabulates exactly one outcome") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {0.5, 0.5};
  const empirical_distribution dist = simulate_pk(cfg, systems, 1, {2, 1, 123, 1});
  std::uint64_t total = 0;
  for (const auto& [k, c] : dist.counts()) {
    (void)k;
    total += c;
  }
  CHECK(total == 1);
  CHECK(dist.total_probability() == doctest::Approx(1.0));
}

TEST_CASE("exact chain: sure noiseless answer is a point mass on the correct claim") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.0};
  const exact_chain_result res = exact_chain(cfg, systems, 2, 10000);
  REQUIRE(res.outcomes.size() == 1);
  CHECK(res.list_probabilities.at("SYNTHU:0#t") == doctest::Approx(1.0));
}

TEST_CASE("exact chain: noisy kernel splits mass 0.7/0.1/0.1/0.1 over valences") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.3};
  const exact_chain_result res = exact_chain(cfg, systems, 2, 10000);
  const valence_distribution d = res.answer(q0);
  CHECK(d[valence::theorem] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(d[valence::antitheorem] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d[valence::not_wff] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d[valence::undecidable] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact chain: solve rate zero leaves all mass on the empty tape") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {0.0, 0.0};
  const exact_chain_result res = exact_chain(cfg, systems, 3, 10000);
  REQUIRE(res.outcomes.size() == 1);
  CHECK(res.outcomes[0].first.empty());
  CHECK(res.outcomes[0].second == doctest::Approx(1.0));
}

TEST_CASE("exact chain enforces its state budget") {
  const system_set systems = system_set::builtins();
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.max_string_len = 2;
  cfg.kernel = {0.5, 0.5};
  CHECK_THROWS_AS((void)exact_chain(cfg, systems, 6, 50), state_space_too_large);
}

TEST_CASE("claims containment estimates at the edges") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.0};
  const run_options opt{3, 400, 17, 1};

  SUBCASE("the empty set is contained with probability 1") {
    const containment_estimate e = estimate_claims_distribution(cfg, systems, claims_set{}, opt);
    CHECK(e.estimate == doctest::Approx(1.0));
    CHECK(e.count == e.denominator);
  }
  SUBCASE("a forced noiseless run contains the oracle claim with probability 1") {
    const claims_set target = decode_set("SYNTHU:0#t");
    const containment_estimate e = estimate_claims_distribution(cfg, systems, target, opt);
    CHECK(e.estimate == doctest::Approx(1.0));
  }
  SUBCASE("a claim contradicting a noiseless run never appears") {
    const claims_set target = decode_set("SYNTHU:0#a");
    const containment_estimate e = estimate_claims_distribution(cfg, systems, target, opt);
    CHECK(e.estimate == doctest::Approx(0.0));
    CHECK(e.count == 0);
  }
}

TEST_CASE("answer distribution matches the kernel and flags unanswerable questions") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.0};
  const run_options opt{3, 500, 23, 1};
  const answer_estimate est = answer_distribution(cfg, systems, q0, opt);
  CHECK(est.denominator == 500);
  CHECK(est.probabilities()[valence::theorem] == doctest::Approx(1.0));

  // q1 is never asked by this policy, so no replica ever answers it.
  CHECK_THROWS_AS((void)answer_distribution(cfg, systems, q1, opt), question_never_answered);
}

TEST_CASE("generalized answer with an empty conditioning set is bit-identical") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.8, 0.25};
  const run_options opt{4, 800, 31, 1};
  const answer_estimate plain = answer_distribution(cfg, systems, q0, opt);
  const answer_estimate cond = generalized_answer_distribution(cfg, systems, q0, claims_set{}, opt);
  CHECK(cond.counts == plain.counts);
  CHECK(cond.denominator == plain.denominator);
}

TEST_CASE("conditioning on an impossible event is reported, not silently zero") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.0};
  const run_options opt{3, 200, 37, 1};
  const claims_set impossible = decode_set("SYNTHU:0#a");
  CHECK_THROWS_AS((void)generalized_answer_distribution(cfg, systems, q0, impossible, opt),
                  conditioning_never_observed);
}

TEST_CASE("conditioning shifts the answer distribution of a coupled machine") {
  // Under a noisy kernel, conditioning on the tape containing (q1, a) selects
  // nothing about q0 (attempts are independent), so the conditional stays
  // near the unconditional. This is a smoke test that the estimator runs and
  // normalizes; the sharp identity checks live in the exact-chain cases.
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.7, 0.3};
  const run_options opt{5, 4000, 41, 1};
  const claims_set cond = decode_set("SYNTHU:1#a");
  const answer_estimate est = generalized_answer_distribution(cfg, systems, q0, cond, opt);
  CHECK(est.denominator > 0);
  CHECK(est.probabilities().total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("passage conditioning: the empty list qualifies every replica") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {0.6, 0.2};
  const run_options opt{3, 300, 43, 1};
  const containment_estimate all =
      list_conditioned_claims(cfg, systems, claims_list{}, decode_set("SYNTHU:0#t"), opt);
  CHECK(all.denominator == 300);

  const claims_list never{{q0, valence::not_wff}, {q1, valence::not_wff}};
  CHECK_THROWS_AS(
      (void)list_conditioned_claims(cfg, systems, never, decode_set("SYNTHU:0#t"), opt),
      conditioning_list_never_reached);
}

TEST_CASE("passage-conditioned answers renormalize over passing replicas") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.5, 0.2};
  const run_options opt{5, 3000, 47, 1};
  const claims_list through{{q0, valence::theorem}};
  const answer_estimate est = list_conditioned_answer(cfg, systems, through, q0, opt);
  // Passage through [(q0,t)] pins the first claim, so every passing replica
  // answers q0 with t (claims are never removed here).
  CHECK(est.probabilities()[valence::theorem] == doctest::Approx(1.0));
}

TEST_CASE("marginal consistency on the same sample is an exact counting identity") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {1.0, 0.4};
  const run_options opt{4, 2000, 53, 1};
  const empirical_distribution d1 = simulate_pk(cfg, systems, 1, opt);
  const empirical_distribution d2 = simulate_pk(cfg, systems, 2, opt);
  const marginal_report rep = check_marginal_consistency(d1, d2);
  CHECK(rep.max_discrepancy == 0.0);
  CHECK(rep.within(0.0));
}

TEST_CASE("marginal consistency across independent samples sits within 3 sigma") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.9, 0.3};
  const empirical_distribution d1 = simulate_pk(cfg, systems, 1, {4, 4000, 1001, 1});
  const empirical_distribution d2 = simulate_pk(cfg, systems, 2, {4, 4000, 2002, 1});
  const marginal_report rep = check_marginal_consistency(d1, d2);
  CHECK(rep.within_3_sigma());
}

TEST_CASE("point-mass machines marginalize with zero discrepancy") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {1.0, 0.0};
  const empirical_distribution d1 = simulate_pk(cfg, systems, 1, {4, 100, 7, 1});
  const empirical_distribution d2 = simulate_pk(cfg, systems, 2, {4, 100, 7, 1});
  const marginal_report rep = check_marginal_consistency(d1, d2);
  CHECK(rep.max_discrepancy == 0.0);
}

TEST_CASE("Monte Carlo matches the exact chain within Wilson intervals") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.7, 0.3};
  const std::uint64_t horizon = 3;
  const exact_chain_result oracle = exact_chain(cfg, systems, horizon, 100000);

  const run_options opt{horizon, 20000, 97, 1};
  const empirical_distribution mc = simulate_pk(cfg, systems, 2, opt);
  const std::map<std::string, double> exact_p = oracle.prefix_probabilities(2);

  int covered = 0, checked = 0;
  for (const auto& [key, p] : exact_p) {
    if (p < 1e-6) continue;
    const dist_entry e = mc.entry(key, z_99);
    ++checked;
    if (e.ci.contains(p)) ++covered;
  }
  REQUIRE(checked >= 4);
  // 99% intervals over a handful of keys: allow at most one miss.
  CHECK(covered >= checked - 1);

  // Valence-level agreement for the first question.
  const answer_estimate ans = answer_distribution(cfg, systems, q0, opt);
  const valence_distribution truth = oracle.answer(q0);
  for (valence v : {valence::theorem, valence::antitheorem, valence::not_wff,
                    valence::undecidable}) {
    CHECK(ans.ci(v, z_99).contains(truth[v]));
  }
}

TEST_CASE("empirical prefix distributions converge to the oracle in TV distance") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {0.8, 0.2};
  const exact_chain_result oracle = exact_chain(cfg, systems, 2, 10000);
  const std::map<std::string, double> truth = oracle.prefix_probabilities(1);

  const double tv_small =
      tv_distance(simulate_pk(cfg, systems, 1, {2, 200, 5, 1}).probabilities(), truth);
  const double tv_large =
      tv_distance(simulate_pk(cfg, systems, 1, {2, 20000, 5, 1}).probabilities(), truth);
  CHECK(tv_large < 0.02);
  CHECK(tv_large <= tv_small + 0.01);
}

TEST_CASE("exact chain with removal keeps a normalized outcome distribution") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0});
  cfg.kernel = {1.0, 0.3};
  cfg.removal_rate = 0.2;
  const exact_chain_result res = exact_chain(cfg, systems, 3, 100000);
  CHECK(sum_probabilities(res.list_probabilities) == doctest::Approx(1.0).epsilon(1e-9));
  // Removal makes the empty tape reachable again at the horizon.
  CHECK(res.list_probabilities.count(""));
}

TEST_CASE("exact passage probabilities match their Monte Carlo counterparts") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.6, 0.25};
  const std::uint64_t horizon = 4;
  const claims_list through{{q0, valence::theorem}};
  const exact_chain_result res = exact_chain(cfg, systems, horizon, 100000, through);
  REQUIRE(res.passage_probability > 0.0);

  const run_options opt{horizon, 20000, 113, 1};
  const answer_estimate mc = list_conditioned_answer(cfg, systems, through, q1, opt);
  const valence_distribution truth = res.passed_answer(q1);
  for (valence v : {valence::theorem, valence::antitheorem, valence::not_wff,
                    valence::undecidable}) {
    CHECK(mc.ci(v, z_99).contains(truth[v]));
  }
}

TEST_CASE("maximal detection reports horizon-truncated frontier lists") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.5, 0.0};
  const run_options opt{4, 500, 59, 1};
  const maximal_report rep = detect_maximal(cfg, systems, opt);
  CHECK(rep.horizon_truncated);
  REQUIRE(!rep.maximal.empty());
  // No maximal list is a proper prefix of another maximal list.
  for (const auto& a : rep.maximal) {
    for (const auto& b : rep.maximal) {
      CHECK_FALSE(proper_prefix_of(a, b));
    }
  }
  // The full two-claim tape is observed and dominates any shorter prefix.
  const claims_list full{{q0, valence::theorem}, {q1, valence::antitheorem}};
  bool found_full = false;
  for (const auto& m : rep.maximal) {
    if (m == full) found_full = true;
  }
  CHECK(found_full);
}

TEST_CASE("threaded tabulation merges to the same integer counts") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = fixed_list_config({q0, q1});
  cfg.kernel = {0.7, 0.3};
  const empirical_distribution one = simulate_pk(cfg, systems, 2, {4, 3000, 67, 1});
  const empirical_distribution four = simulate_pk(cfg, systems, 2, {4, 3000, 67, 4});
  CHECK(one.counts() == four.counts());
}

TEST_CASE("distribution entries report Wilson intervals on their own counts") {
  const empirical_distribution dist({{"A", 25}, {"B", 75}}, 100, 5);
  const dist_entry a = dist.entry("A");
  CHECK(a.count == 25);
  CHECK(a.estimate == doctest::Approx(0.25));
  const interval w = wilson_interval(25, 100, z_95);
  CHECK(a.ci.lo == doctest::Approx(w.lo));
  CHECK(a.ci.hi == doctest::Approx(w.hi));
  CHECK(dist.entry("missing").count == 0);
}
