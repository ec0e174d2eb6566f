// Serial reference kernels against their OpenMP versions, and the two engines.

#include <benchmark/benchmark.h>

#include <vector>

#include "specqp/catalog.hpp"
#include "specqp/executor.hpp"
#include "specqp/oracle.hpp"
#include "specqp/synthetic.hpp"

using namespace specqp;

namespace {

struct Fixture {
  TripleStore store;
  RuleSet rules;
  std::vector<TripleQuery> queries;
  std::vector<TriplePattern> patterns;  // query patterns plus relaxation ranges
};

const Fixture& fixture() {
  static const Fixture f = [] {
    SyntheticConfig cfg;
    cfg.seed = 7;
    cfg.triples = 20'000;
    cfg.classes = 80;
    cfg.max_patterns = 3;
    SyntheticFixture fx = make_fixture(cfg, 40);
    Fixture out{TripleStore::build(fx.records), RuleSet(fx.rules), fx.queries, {}};
    for (const auto& q : out.queries) {
      for (const auto& p : q.patterns) {
        out.patterns.push_back(p);
        for (const auto& r : out.rules.relaxations_for(p)) out.patterns.push_back(r.range);
      }
    }
    return out;
  }();
  return f;
}

void BM_OracleSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    for (const auto& q : f.queries) benchmark::DoNotOptimize(oracle_topk_serial(q, f.rules, f.store, 10));
  }
}

void BM_OracleParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    for (const auto& q : f.queries) benchmark::DoNotOptimize(oracle_topk(q, f.rules, f.store, 10));
  }
}

void BM_PrebuildSerial(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    PatternStatsCatalog cat(f.store);
    benchmark::DoNotOptimize(cat.prebuild(f.patterns, false));
  }
}

void BM_PrebuildParallel(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    PatternStatsCatalog cat(f.store);
    benchmark::DoNotOptimize(cat.prebuild(f.patterns, true));
  }
}

void BM_Engine(benchmark::State& state, Engine engine) {
  const Fixture& f = fixture();
  PatternStatsCatalog cat(f.store);
  cat.prebuild(f.patterns);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    for (const auto& q : f.queries) benchmark::DoNotOptimize(run_query(q, k, engine, f.store, f.rules, cat));
  }
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrebuildSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PrebuildParallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Engine, trinit, Engine::kTrinit)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Engine, specqp, Engine::kSpecQP)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
