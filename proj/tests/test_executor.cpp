#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/executor.hpp"
#include "specqp/oracle.hpp"
#include "support.hpp"

using namespace specqp;
using specqp::testing::same_bindings_above_ties;
using specqp::testing::same_scores;
using specqp::testing::scores_of;
using specqp::testing::store_of;

namespace {

TripleQuery three_pattern_query() {
  return TripleQuery{{parse_pattern("?s type a"), parse_pattern("?s type b"), parse_pattern("?s type c")}};
}

TripleStore abc_store() {
  std::vector<TripleRecord> recs;
  for (int i = 0; i < 30; ++i) {
    const std::string e = "e" + std::to_string(i);
    recs.push_back({e, "type", "a", double(1 + i % 7)});
    if (i % 2 == 0) recs.push_back({e, "type", "b", double(1 + i % 5)});
    if (i % 3 == 0) recs.push_back({e, "type", "c", double(1 + i % 4)});
    if (i % 4 == 1) recs.push_back({e, "type", "b2", double(1 + i % 3)});
  }
  return store_of(recs);
}

RuleSet abc_rules() {
  return RuleSet({{parse_pattern("?s type b"), parse_pattern("?s type b2"), 0.6},
                  {parse_pattern("?s type a"), parse_pattern("?s type c"), 0.3}});
}

std::size_t count_named(const ExecutionReport& r, const std::string& prefix) {
  return std::count_if(r.operators.begin(), r.operators.end(),
                       [&](const OperatorReport& o) { return o.name.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST(Execute, SpeculativeTreeShape) {
  TripleStore s = abc_store();
  QueryPlan p{three_pattern_query(), {0, 2}, {1}, 5};
  ExecutionResult r = execute(p, s, abc_rules());
  EXPECT_EQ(r.report.plan, "{{q1,q3},{q2}}");
  EXPECT_EQ(count_named(r.report, "incremental_merge"), 1u);
  EXPECT_EQ(count_named(r.report, "rank_join"), 2u);
  EXPECT_EQ(count_named(r.report, "scan"), 2u);
}

TEST(Execute, BaselineTreeShape) {
  TripleStore s = abc_store();
  ExecutionResult r = execute(trinit_plan(three_pattern_query(), 5), s, abc_rules());
  EXPECT_EQ(r.report.plan, "{{q1},{q2},{q3}}");
  EXPECT_EQ(count_named(r.report, "incremental_merge"), 3u);
  EXPECT_EQ(count_named(r.report, "rank_join"), 2u);
}

TEST(Execute, SinglePatternIsSortedScanHead) {
  TripleStore s = abc_store();
  TripleQuery q{{parse_pattern("?s type a")}};
  ExecutionResult r = execute(QueryPlan{q, {0}, {}, 4}, s, RuleSet());
  auto all = s.matches(q[0]);
  ASSERT_EQ(r.answers.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.answers[i].score, all[i].norm_score);
    EXPECT_EQ(r.answers[i].binding, all[i].binding);
  }
  EXPECT_EQ(r.report.operators.size(), 1u);
}

TEST(Execute, RejectsBadPartitions) {
  TripleStore s = abc_store();
  EXPECT_THROW(execute(QueryPlan{three_pattern_query(), {0, 1}, {1, 2}, 5}, s, RuleSet()), PlanInvalid);
  EXPECT_THROW(execute(QueryPlan{three_pattern_query(), {0}, {1}, 5}, s, RuleSet()), PlanInvalid);
  EXPECT_THROW(execute(QueryPlan{three_pattern_query(), {0, 1, 2, 3}, {}, 5}, s, RuleSet()), PlanInvalid);
  EXPECT_THROW(execute(QueryPlan{three_pattern_query(), {0, 1, 2}, {}, 0}, s, RuleSet()), PlanInvalid);
}

TEST(Execute, CountsEveryMaterializedAnswer) {
  TripleStore s = abc_store();
  RuleSet rules = abc_rules();
  ExecutionResult a = execute(trinit_plan(three_pattern_query(), 3), s, rules);
  ExecutionResult b = execute(trinit_plan(three_pattern_query(), 3), s, rules);
  EXPECT_EQ(a.report.answers_created, b.report.answers_created);
  std::uint64_t merged = 0;
  for (const auto& o : a.report.operators) {
    if (o.name.rfind("incremental_merge", 0) == 0) merged += o.pulls;
  }
  EXPECT_GT(a.report.answers_created, merged);
}

TEST(Execute, BaselineEqualsOracleOnRandomFixtures) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.triples = 300 + 400 * seed;
    cfg.classes = 12 + seed;
    auto b = specqp::testing::build(cfg, 8);
    PatternStatsCatalog cat(b.store);
    for (const auto& q : b.queries) {
      if (oracle_combinations(q, b.rules) > 50000) continue;
      for (std::size_t k : {1, 5, 10, 20}) {
        auto truth = oracle_topk(q, b.rules, b.store, k).answers;
        auto run = run_query(q, k, Engine::kTrinit, b.store, b.rules, cat);
        ASSERT_TRUE(same_scores(scores_of(run.answers), scores_of(truth))) << seed << " " << to_string(q) << " k=" << k;
        EXPECT_TRUE(same_bindings_above_ties(run.answers, truth)) << seed << " k=" << k;
      }
    }
  }
}

TEST(Execute, SpeculativeAnswersAreRealAnswers) {
  for (std::uint64_t seed = 30; seed < 36; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.triples = 2500;
    auto b = specqp::testing::build(cfg, 10);
    PatternStatsCatalog cat(b.store);
    for (const auto& q : b.queries) {
      if (oracle_combinations(q, b.rules) > 50000) continue;
      auto everything = oracle_topk(q, b.rules, b.store, 1'000'000).answers;
      auto run = run_query(q, 10, Engine::kSpecQP, b.store, b.rules, cat);
      for (const auto& a : run.answers) {
        EXPECT_NEAR(certificate_score(a.provenance), a.score, 1e-9);
        auto it = std::find_if(everything.begin(), everything.end(),
                               [&](const ScoredBinding& o) { return o.binding == a.binding; });
        ASSERT_NE(it, everything.end());
        EXPECT_LE(a.score, it->score + 1e-9);
      }
    }
  }
}

TEST(Execute, NoSingletonsMatchesUnrelaxedOracle) {
  TripleStore s = abc_store();
  QueryPlan p{three_pattern_query(), {0, 1, 2}, {}, 3};
  auto truth = oracle_topk(p.query, RuleSet(), s, 3).answers;
  ASSERT_EQ(truth.size(), 3u);
  ExecutionResult r = execute(p, s, abc_rules());
  EXPECT_TRUE(same_scores(scores_of(r.answers), scores_of(truth)));
}

TEST(Execute, RelaxingEverythingIsTheBaseline) {
  TripleStore s = abc_store();
  RuleSet rules = abc_rules();
  PatternStatsCatalog cat(s);
  // k beyond the original answer count forces the fallback.
  auto spec = run_query(three_pattern_query(), 50, Engine::kSpecQP, s, rules, cat);
  auto base = run_query(three_pattern_query(), 50, Engine::kTrinit, s, rules, cat);
  ASSERT_TRUE(spec.diagnostics->fallback);
  EXPECT_EQ(spec.plan.singletons.size(), 2u);  // q3 has no rule
  ASSERT_EQ(spec.answers.size(), base.answers.size());
  EXPECT_TRUE(same_scores(scores_of(spec.answers), scores_of(base.answers)));
}

TEST(Execute, EngineNames) {
  EXPECT_EQ(parse_engine("trinit"), Engine::kTrinit);
  EXPECT_EQ(parse_engine("specqp"), Engine::kSpecQP);
  EXPECT_THROW(parse_engine("fast"), ArgumentError);
}
