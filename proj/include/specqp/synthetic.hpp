#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "specqp/pattern.hpp"
#include "specqp/rules.hpp"
#include "specqp/store.hpp"

namespace specqp {

enum class ScoreShape { kPowerLaw, kUniform, kConstant, kMixed };

const char* to_string(ScoreShape shape);
ScoreShape parse_score_shape(const std::string& name);

// Type-style graph: entities carry classes (`e12 type c3`) with a skewed
// class popularity, plus `e1 link e2` edges. Queries are stars over an
// entity's classes, sometimes extended by a link to a second entity. Each
// class gets a random number of relaxation rules to other classes.
struct SyntheticConfig {
  std::uint64_t seed = 1;
  std::size_t triples = 2000;
  std::size_t classes = 30;
  std::size_t min_patterns = 1;
  std::size_t max_patterns = 4;
  std::size_t max_relaxations = 10;
  double link_fraction = 0.2;      // share of triples that are links
  double chain_probability = 0.3;  // chance a multi-pattern query uses a link
  ScoreShape shape = ScoreShape::kMixed;
};

struct SyntheticFixture {
  std::vector<TripleRecord> records;
  std::vector<WeightedRelaxationRule> rules;
  std::vector<TripleQuery> queries;
};

// Deterministic for a fixed config. Every query has at least one answer
// without relaxation.
SyntheticFixture make_fixture(const SyntheticConfig& config, std::size_t query_count);

// Tag-style corpus for rule mining: items with 2-6 tags drawn from a
// skewed vocabulary, every (item, hasTag, tag) triple scored by the item's
// popularity.
std::vector<TripleRecord> make_tag_corpus(std::uint64_t seed, std::size_t items, std::size_t vocabulary);

}  // namespace specqp
