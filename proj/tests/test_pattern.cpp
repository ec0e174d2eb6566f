#include <sstream>

#include <gtest/gtest.h>

#include "specqp/errors.hpp"
#include "specqp/pattern.hpp"

using namespace specqp;

TEST(Pattern, ParsesThreeTokens) {
  TriplePattern p = parse_pattern("?s rdf:type <singer>");
  EXPECT_EQ(p.subject, "?s");
  EXPECT_EQ(p.predicate, "rdf:type");
  EXPECT_EQ(p.object, "<singer>");
  EXPECT_TRUE(p.has_constant());
  EXPECT_EQ(p.variables(), std::vector<std::string>{"?s"});
  EXPECT_EQ(to_string(p), "?s rdf:type <singer>");
}

TEST(Pattern, RejectsWrongTokenCount) {
  EXPECT_THROW(parse_pattern("?s type"), ParseError);
  EXPECT_THROW(parse_pattern("?s type a b"), ParseError);
}

TEST(Pattern, CanonicalKeyIgnoresVariableNames) {
  EXPECT_EQ(canonical_key(parse_pattern("?x p ?y")), canonical_key(parse_pattern("?a p ?b")));
  EXPECT_NE(canonical_key(parse_pattern("?x p ?y")), canonical_key(parse_pattern("?y p ?y")));
}

TEST(Query, ValidationRejectsBadShapes) {
  EXPECT_THROW(validate_query(TripleQuery{}), InvalidQuery);
  EXPECT_THROW(validate_query(TripleQuery{{parse_pattern("?s ?p ?o")}}), InvalidQuery);
  TripleQuery disconnected{{parse_pattern("?s type a"), parse_pattern("?t type b")}};
  EXPECT_THROW(validate_query(disconnected), InvalidQuery);
  TripleQuery chain{{parse_pattern("?s link ?o"), parse_pattern("?o type b")}};
  EXPECT_NO_THROW(validate_query(chain));
}

TEST(Query, FileSplitsOnBlankLinesAndSkipsComments) {
  std::istringstream in("# first\n?s type a\n?s type b\n\n\n?x type c\n");
  auto qs = parse_queries(in);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].size(), 2u);
  EXPECT_EQ(qs[1].size(), 1u);
}

TEST(Query, ParseErrorCarriesLine) {
  std::istringstream in("?s type a\n?s type\n");
  try {
    parse_queries(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
