#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ndr/errors.hpp"
#include "ndr/ndr_machine.hpp"
#include "ndr/stats.hpp"

using namespace ndr;

namespace {

ndr_config base_config() {
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "fixed-list";
  cfg.policy.count = 1;
  cfg.max_string_len = 2;
  return cfg;
}

const question q0{"SYNTHU", "0"};
const question q1{"SYNTHU", "1"};
const question qu{"SYNTHU", "u0"};

}  // namespace

TEST_CASE("iterate with a silent policy only bumps the iteration counter") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();  // fixed-list with no questions: emits nothing
  ndr_state state;
  rng r(1);
  const ndr_state next = iterate(state, cfg, systems, r);
  CHECK(next.iteration() == 1);
  CHECK(next.open_questions().empty());
  CHECK(next.claims().empty());
}

TEST_CASE("one open question with a sure noiseless kernel commits the oracle valence") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.kernel = {1.0, 0.0};
  ndr_state state = ndr_state::from_parts({q0}, {}, 0);
  rng r(5);
  const ndr_state next = iterate(state, cfg, systems, r);
  REQUIRE(next.claims().size() == 1);
  CHECK(next.claims()[0].q == q0);
  CHECK(next.claims()[0].v == systems.classify(q0));
  CHECK(next.open_questions().empty());
}

TEST_CASE("solve rate zero leaves both tapes unchanged") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.kernel = {0.0, 0.0};
  ndr_state state = ndr_state::from_parts({q0, qu}, {}, 3);
  rng r(5);
  const ndr_state next = iterate(state, cfg, systems, r);
  CHECK(next.open_questions() == std::vector<question>{q0, qu});
  CHECK(next.claims().empty());
  CHECK(next.iteration() == 4);
}

TEST_CASE("answer kernel edge cases and calibration") {
  const system_set systems = system_set::builtins();
  const formal_system& oracle = systems.get("SYNTHU");

  SUBCASE("eta 0, s 1: always the oracle valence") {
    rng r(2);
    for (int i = 0; i < 200; ++i) {
      auto v = attempt_answer({1.0, 0.0}, q0, oracle, r);
      REQUIRE(v.has_value());
      CHECK(*v == valence::theorem);
    }
  }
  SUBCASE("eta 1, s 1: never the oracle valence") {
    rng r(3);
    for (int i = 0; i < 200; ++i) {
      auto v = attempt_answer({1.0, 1.0}, q0, oracle, r);
      REQUIRE(v.has_value());
      CHECK(*v != valence::theorem);
    }
  }
  SUBCASE("s 0: never an answer") {
    rng r(4);
    for (int i = 0; i < 200; ++i) {
      CHECK_FALSE(attempt_answer({0.0, 0.3}, q0, oracle, r).has_value());
    }
  }
  SUBCASE("eta 0.3, s 1: wrong-valence frequency within 3 sigma of 0.3") {
    rng r(6);
    const std::uint64_t n = 100000;
    std::uint64_t wrong = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      auto v = attempt_answer({1.0, 0.3}, q0, oracle, r);
      REQUIRE(v.has_value());
      if (*v != valence::theorem) ++wrong;
    }
    const interval band = binomial_frequency_interval(0.3, n, 3.0);
    CHECK(band.contains(static_cast<double>(wrong) / static_cast<double>(n)));
  }
}

TEST_CASE("uniform policy is reproducible under a fixed seed") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 3;
  const auto policy = make_policy(cfg, systems);
  ndr_state state;
  rng r1(42), r2(42);
  CHECK(policy->sample(state, cfg, systems, r1) == policy->sample(state, cfg, systems, r2));
}

TEST_CASE("wff-biased policy with weight 1 emits only WFFs") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "wff-biased";
  cfg.policy.wff_weight = 1.0;
  cfg.policy.count = 2;
  const auto policy = make_policy(cfg, systems);
  ndr_state state;
  rng r(9);
  for (int i = 0; i < 300; ++i) {
    for (const question& q : policy->sample(state, cfg, systems, r)) {
      CHECK(systems.is_wff(q));
    }
  }
}

TEST_CASE("breakthrough-greedy emits the highest-scoring question, ties lexicographic") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "breakthrough-greedy";
  cfg.policy.count = 1;
  cfg.max_string_len = 1;
  cfg.policy.dependents[q1] = {q0, qu};
  cfg.policy.dependents[question{"SYNTHU", "u"}] = {q0};
  const auto policy = make_policy(cfg, systems);
  rng r(1);

  // Both dependents of q1 open: q1 scores 2, SYNTHU:u scores 1.
  ndr_state state = ndr_state::from_parts({q0, qu}, {}, 0);
  auto batch = policy->sample(state, cfg, systems, r);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0] == q1);

  // Nothing open: every candidate scores 0 and the smallest unasked string
  // wins, which is the empty string.
  ndr_state empty_state;
  batch = policy->sample(empty_state, cfg, systems, r);
  REQUIRE(batch.size() == 1);
  CHECK(batch[0] == question{"SYNTHU", ""});

  // The exact-emission enumeration is the same single deterministic batch.
  auto options = policy->enumerate(state, cfg, systems);
  REQUIRE(options.size() == 1);
  CHECK(options[0].first == std::vector<question>{q1});
  CHECK(options[0].second == doctest::Approx(1.0));
}

TEST_CASE("fixed-list policy asks its questions in order") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.questions = {q0, q1, qu};
  cfg.kernel = {1.0, 0.0};
  const ndr_engine engine(cfg, systems);
  rng r(8);
  const ndr_state state = engine.run(3, r);
  REQUIRE(state.claims().size() == 3);
  CHECK(state.claims()[0].q == q0);
  CHECK(state.claims()[1].q == q1);
  CHECK(state.claims()[2].q == qu);
}

TEST_CASE("exhaustive policy sweeps all strings shortest first") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "exhaustive";
  cfg.policy.count = 4;
  cfg.max_string_len = 1;
  cfg.kernel = {1.0, 0.0};
  const ndr_engine engine(cfg, systems);
  rng r(8);
  const ndr_state state = engine.run(3, r);
  // 5 strings of length <= 1; all asked within two iterations and answered.
  std::set<std::string> formulas;
  for (const auto& c : state.claims()) formulas.insert(c.q.formula);
  CHECK(formulas == std::set<std::string>{"", "0", "1", "u", "~"});
}

TEST_CASE("tape discipline: a question never sits on both tapes") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.kernel = {0.5, 0.4};
  cfg.removal_rate = 0.15;
  const ndr_engine engine(cfg, systems);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    rng r = rng::substream(1234, seed);
    ndr_state state;
    for (int k = 0; k < 30; ++k) {
      engine.advance(state, r);
      for (const question& q : state.open_questions()) {
        CHECK_FALSE(list_contains_question(state.claims(), q));
      }
    }
  }
}

TEST_CASE("non-repeating enforcement holds at every iteration") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.kernel = {0.7, 0.3};
  cfg.removal_rate = 0.1;
  cfg.enforce_non_repeating = true;
  const ndr_engine engine(cfg, systems);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    rng r = rng::substream(77, seed);
    ndr_state state;
    for (int k = 0; k < 30; ++k) {
      engine.advance(state, r);
      CHECK(is_non_repeating(state.claims()));
    }
  }
}

TEST_CASE("claims only append when the removal rate is zero") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 1;
  cfg.kernel = {0.6, 0.2};
  cfg.removal_rate = 0.0;
  const ndr_engine engine(cfg, systems);
  rng r(5150);
  ndr_state state;
  claims_list previous;
  for (int k = 0; k < 40; ++k) {
    engine.advance(state, r);
    const claims_list& now = state.claims();
    REQUIRE(now.size() >= previous.size());
    CHECK(std::equal(previous.begin(), previous.end(), now.begin()));
    previous = now;
  }
}

TEST_CASE("zero noise is mistake-free across seeds") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.kernel = {0.8, 0.0};
  const ndr_engine engine(cfg, systems);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng r = rng::substream(31337, seed);
    const ndr_state state = engine.run(500, r);
    CHECK(is_mistake_free(state.claims(), systems));
  }
}

TEST_CASE("identical config and seed give identical trace streams") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.kernel = {0.5, 0.5};
  cfg.removal_rate = 0.2;
  const ndr_engine engine(cfg, systems);
  std::vector<trace_event> events_a, events_b;
  rng ra(999), rb(999);
  (void)engine.run(50, ra, &events_a);
  (void)engine.run(50, rb, &events_b);
  REQUIRE(events_a.size() == events_b.size());
  for (std::size_t i = 0; i < events_a.size(); ++i) {
    CHECK(trace_event_line(events_a[i]) == trace_event_line(events_b[i]));
  }
}

TEST_CASE("trace events are strictly ordered and round-trip through text") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.policy.kind = "uniform";
  cfg.policy.count = 1;
  cfg.kernel = {0.9, 0.2};
  cfg.removal_rate = 0.1;
  const ndr_engine engine(cfg, systems);
  std::vector<trace_event> events;
  rng r(7);
  (void)engine.run(30, r, &events);
  REQUIRE(!events.empty());
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i].sequence == events[i - 1].sequence + 1);
    CHECK(events[i].iteration >= events[i - 1].iteration);
  }
  for (const auto& e : events) {
    const trace_event back = parse_trace_event(trace_event_line(e));
    CHECK(back.iteration == e.iteration);
    CHECK(back.kind == e.kind);
    CHECK(back.q == e.q);
    CHECK(back.v == e.v);
    CHECK(back.index == e.index);
  }
}

TEST_CASE("mistake and repetition predicates") {
  const system_set systems = system_set::builtins();
  CHECK(is_mistake_free({}, systems));
  const claim good{{"MODARITH", "1+1=2"}, valence::theorem};
  const claim bad{{"MODARITH", "1+1=2"}, valence::antitheorem};
  CHECK(is_mistake_free({good}, systems));
  CHECK_FALSE(is_mistake_free({bad}, systems));

  CHECK(is_non_repeating({}));
  CHECK_FALSE(is_non_repeating({good, bad}));  // same question, different valences
  CHECK(is_non_repeating({good, claim{q1, valence::antitheorem}}));
}

TEST_CASE("prefix returns the first n claims and checks bounds") {
  const claims_list c{{q0, valence::theorem}, {q1, valence::antitheorem}, {qu, valence::undecidable}};
  CHECK(prefix(c, 0).empty());
  CHECK(prefix(c, 3) == c);
  const claims_list two = prefix(c, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == c[0]);
  CHECK(two[1] == c[1]);
  CHECK_THROWS_AS((void)prefix(c, 4), index_out_of_range);
}

TEST_CASE("config validation rejects out-of-range rates and unknown systems") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  cfg.kernel.noise_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(systems), invalid_config);
  cfg = base_config();
  cfg.removal_rate = -0.1;
  CHECK_THROWS_AS(cfg.validate(systems), invalid_config);
  cfg = base_config();
  cfg.systems = {"NOSUCH"};
  CHECK_THROWS_AS(cfg.validate(systems), invalid_config);
  cfg = base_config();
  cfg.max_string_len = 40;
  CHECK_THROWS_AS(cfg.validate(systems), invalid_config);
}

TEST_CASE("without enforcement a re-asked question is answered again, tapes stay disjoint") {
  const system_set systems = system_set::builtins();
  ndr_config cfg = base_config();
  // A one-string space makes the uniform policy deterministic: it can only
  // ever emit the empty string, so with enforcement off the question is asked
  // and answered afresh on every advance.
  cfg.policy.kind = "uniform";
  cfg.policy.count = 1;
  cfg.max_string_len = 0;
  cfg.enforce_non_repeating = false;
  cfg.kernel = {1.0, 0.0};
  const ndr_engine engine(cfg, systems);
  rng r(3);
  ndr_state state;
  engine.advance(state, r);
  engine.advance(state, r);
  CHECK(state.claims().size() == 2);
  const question empty_q{"SYNTHU", ""};
  for (const claim& c : state.claims()) {
    CHECK(c.q == empty_q);
  }
  CHECK_FALSE(is_non_repeating(state.claims()));
  for (const question& q : state.open_questions()) {
    CHECK_FALSE(list_contains_question(state.claims(), q));
  }
}
