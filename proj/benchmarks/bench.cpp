#include <benchmark/benchmark.h>

#include "ndr/bayes.hpp"
#include "ndr/estimation.hpp"
#include "ndr/formal_system.hpp"
#include "ndr/ndr_machine.hpp"

using namespace ndr;

namespace {

ndr_config bench_config() {
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "uniform";
  cfg.policy.count = 2;
  cfg.kernel = {0.7, 0.3};
  cfg.removal_rate = 0.05;
  cfg.max_string_len = 2;
  return cfg;
}

void bm_engine_iterate(benchmark::State& state) {
  const system_set systems = system_set::builtins();
  const ndr_engine engine(bench_config(), systems);
  rng r(42);
  ndr_state machine_state;
  for (auto _ : state) {
    engine.advance(machine_state, r);
    benchmark::DoNotOptimize(machine_state.claims().size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(bm_engine_iterate);

void bm_replica_run(benchmark::State& state) {
  const system_set systems = system_set::builtins();
  const ndr_engine engine(bench_config(), systems);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    rng r = rng::substream(7, seed++);
    const ndr_state final_state = engine.run(16, r);
    benchmark::DoNotOptimize(final_state.claims().size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 16);
}
BENCHMARK(bm_replica_run);

void bm_exact_chain(benchmark::State& state) {
  const system_set systems = system_set::builtins();
  ndr_config cfg;
  cfg.systems = {"SYNTHU"};
  cfg.policy.kind = "fixed-list";
  cfg.policy.count = 1;
  cfg.policy.questions = {question{"SYNTHU", "0"}, question{"SYNTHU", "1"}};
  cfg.kernel = {0.7, 0.3};
  cfg.max_string_len = 2;
  for (auto _ : state) {
    const auto res = exact_chain(cfg, systems, 4, 100000);
    benchmark::DoNotOptimize(res.outcomes.size());
  }
}
BENCHMARK(bm_exact_chain);

void bm_classify_prop(benchmark::State& state) {
  const formal_system prop = formal_system::make_prop();
  const std::string formula = "((p∧q)→(r∨~p))";
  for (auto _ : state) {
    benchmark::DoNotOptimize(prop.classify(formula));
  }
}
BENCHMARK(bm_classify_prop);

void bm_classify_arith(benchmark::State& state) {
  const formal_system arith = formal_system::make_modarith();
  for (auto _ : state) {
    benchmark::DoNotOptimize(arith.classify("~3+4=8"));
  }
}
BENCHMARK(bm_classify_arith);

void bm_abduction_trial(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto rep = run_abduction_suite(1, seed++);
    benchmark::DoNotOptimize(rep.failures);
  }
}
BENCHMARK(bm_abduction_trial);

void bm_simulate_pk(benchmark::State& state) {
  const system_set systems = system_set::builtins();
  const ndr_config cfg = bench_config();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto dist = simulate_pk(cfg, systems, 2, {8, 100, seed++, 1});
    benchmark::DoNotOptimize(dist.counts().size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100 * 8);
}
BENCHMARK(bm_simulate_pk);

}  // namespace

BENCHMARK_MAIN();
