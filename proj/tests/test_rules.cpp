#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "specqp/errors.hpp"
#include "specqp/rules.hpp"
#include "support.hpp"

using namespace specqp;
using specqp::testing::store_of;

namespace {

RuleSet singer_rules() {
  return RuleSet({{parse_pattern("?s type <singer>"), parse_pattern("?s type <jazz_singer>"), 0.6},
                  {parse_pattern("?s type <singer>"), parse_pattern("?s type <vocalist>"), 0.8},
                  {parse_pattern("?s type <singer>"), parse_pattern("?s type <artist>"), 0.5},
                  {parse_pattern("?s type <lyricist>"), parse_pattern("?s type <writer>"), 0.7}});
}

}  // namespace

TEST(Rules, TopRelaxationIsHeaviest) {
  auto top = singer_rules().top_relaxation(parse_pattern("?x type <singer>"));
  ASSERT_TRUE(top);
  EXPECT_EQ(top->weight, 0.8);
  EXPECT_EQ(to_string(top->range), "?x type <vocalist>");
}

TEST(Rules, RelaxationsSortedAndRenamed) {
  auto rs = singer_rules().relaxations_for(parse_pattern("?who type <singer>"));
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].weight, 0.8);
  EXPECT_EQ(rs[1].weight, 0.6);
  EXPECT_EQ(rs[2].weight, 0.5);
  for (const auto& r : rs) EXPECT_EQ(r.range.subject, "?who");
  EXPECT_TRUE(singer_rules().relaxations_for(parse_pattern("?s type <pianist>")).empty());
  EXPECT_FALSE(singer_rules().top_relaxation(parse_pattern("?s type <pianist>")));
}

TEST(Rules, TwoVariablePatternsRenamePositionally) {
  RuleSet rules({{parse_pattern("?a bornIn ?b"), parse_pattern("?b birthplaceOf ?a"), 0.9}});
  auto rs = rules.relaxations_for(parse_pattern("?person bornIn ?city"));
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(to_string(rs[0].range), "?city birthplaceOf ?person");
}

TEST(Rules, RejectsInvalidRules) {
  EXPECT_THROW(RuleSet({{parse_pattern("?s t a"), parse_pattern("?s t b"), 1.5}}), InvalidRule);
  EXPECT_THROW(RuleSet({{parse_pattern("?s t a"), parse_pattern("?s t b"), -0.1}}), InvalidRule);
  EXPECT_THROW(RuleSet({{parse_pattern("?s t a"), parse_pattern("?s t a"), 0.5}}), InvalidRule);
  EXPECT_THROW(RuleSet({{parse_pattern("?s t a"), parse_pattern("?x t b"), 0.5}}), InvalidRule);
  EXPECT_THROW(RuleSet({{parse_pattern("?s ?p ?o"), parse_pattern("?s t ?o"), 0.5}}), InvalidRule);
}

TEST(Rules, DuplicatePairKeepsLargerWeight) {
  RuleSet rules({{parse_pattern("?s t a"), parse_pattern("?s t b"), 0.3},
                 {parse_pattern("?x t a"), parse_pattern("?x t b"), 0.7}});
  EXPECT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules.top_relaxation(parse_pattern("?s t a"))->weight, 0.7);
}

TEST(Rules, TsvRoundTrip) {
  std::ostringstream out;
  write_rules(out, singer_rules());
  std::istringstream in(out.str());
  RuleSet back = parse_rules(in);
  EXPECT_EQ(back.size(), 4u);
  EXPECT_EQ(back.top_relaxation(parse_pattern("?s type <lyricist>"))->weight, 0.7);
  std::istringstream bad("?s t a\t?s t b\n");
  EXPECT_THROW(parse_rules(bad), ParseError);
}

TEST(Miner, WeightIsConditionalCooccurrence) {
  // T1 on ten items, T2 on four of them and on two others.
  std::vector<TripleRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back({"tw" + std::to_string(i), "hasTag", "T1", 1});
  for (int i = 0; i < 4; ++i) recs.push_back({"tw" + std::to_string(i), "hasTag", "T2", 1});
  recs.push_back({"tw20", "hasTag", "T2", 1});
  recs.push_back({"tw21", "hasTag", "T2", 1});
  RuleSet rules = mine_cooccurrence_rules(store_of(recs), 0.0);
  auto r12 = rules.top_relaxation(parse_pattern("?s hasTag T1"));
  ASSERT_TRUE(r12);
  EXPECT_DOUBLE_EQ(r12->weight, 0.4);
  auto r21 = rules.top_relaxation(parse_pattern("?s hasTag T2"));
  ASSERT_TRUE(r21);
  EXPECT_DOUBLE_EQ(r21->weight, 4.0 / 6.0);
  EXPECT_FALSE(mine_cooccurrence_rules(store_of(recs), 0.5).top_relaxation(parse_pattern("?s hasTag T1")));
}

TEST(Miner, RejectsBadInputs) {
  TripleStore s = store_of({{"a", "hasTag", "x", 1}});
  EXPECT_THROW(mine_cooccurrence_rules(s, 1.5), ArgumentError);
  TripleStore other = store_of({{"a", "type", "x", 1}});
  EXPECT_THROW(mine_cooccurrence_rules(other, 0.1), UnsupportedShape);
}
