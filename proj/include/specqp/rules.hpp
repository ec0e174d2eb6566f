#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specqp/pattern.hpp"

namespace specqp {

class TripleStore;

// (domain, range, weight): matches of `range` stand in for matches of
// `domain` with their scores multiplied by `weight`.
struct WeightedRelaxationRule {
  TriplePattern domain;
  TriplePattern range;
  double weight = 0.0;
};

// A rule applied to a concrete query pattern: `range` is written with the
// query pattern's own variable names.
struct Relaxation {
  TriplePattern range;
  double weight = 0.0;
};

// Immutable after construction. Rules are matched on pattern shape, with
// variables renamed by position, so a rule written with ?x applies to a
// query pattern written with ?s.
class RuleSet {
 public:
  RuleSet() = default;
  // Throws InvalidRule for a weight outside [0, 1], domain == range, a
  // pattern with no constant, or a range whose variables differ from the
  // domain's. Duplicate (domain, range) pairs keep the larger weight.
  explicit RuleSet(std::vector<WeightedRelaxationRule> rules);

  // Weight descending, ties by range text ascending.
  std::vector<Relaxation> relaxations_for(const TriplePattern& pattern) const;
  std::optional<Relaxation> top_relaxation(const TriplePattern& pattern) const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  // All rules in canonical variable naming, grouped by domain key.
  std::vector<WeightedRelaxationRule> rules() const;

 private:
  struct Entry {
    TriplePattern range;  // canonical variable names
    std::string range_text;
    double weight;
  };
  std::map<std::string, std::vector<Entry>> by_domain_;
  std::size_t size_ = 0;
};

// `domain<TAB>range<TAB>weight` per line; blank lines and '#' lines skipped.
RuleSet parse_rules(std::istream& in);
void write_rules(std::ostream& out, const RuleSet& rules);

// Co-occurrence rules over a store of (item, tag_predicate, term) triples:
// w(T1 -> T2) = |items with T1 and T2| / |items with T1|. Emits
// (?s tag T1) -> (?s tag T2) for every ordered pair with w >= min_weight
// and w > 0. Throws UnsupportedShape if any triple uses another predicate.
RuleSet mine_cooccurrence_rules(const TripleStore& store, double min_weight,
                                std::string_view tag_predicate = "hasTag");

}  // namespace specqp
