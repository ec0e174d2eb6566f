#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specqp/pattern.hpp"
#include "specqp/rules.hpp"
#include "specqp/score_model.hpp"

namespace specqp {

class TripleStore;
class PatternStatsCatalog;

// Partition of a query: patterns run through plain rank joins (the join
// group) and patterns run through an incremental merge with their
// relaxations (singletons). Both hold indices into `query`.
struct QueryPlan {
  TripleQuery query;
  std::vector<std::size_t> join_group;
  std::vector<std::size_t> singletons;
  std::size_t k = 0;
};

// "{{q1,q3},{q2}}" with 1-based pattern numbers, join group first.
std::string to_string(const QueryPlan& plan);
// Throws PlanInvalid unless join group and singletons partition the query.
void validate_plan(const QueryPlan& plan);

enum class DecisionReason {
  kNoRelaxation,  // no rule applies to the pattern
  kEstimate,      // relaxed top score compared against the k-th score
  kFallback,      // the original query cannot fill k
};

const char* to_string(DecisionReason reason);

struct PatternDecision {
  std::size_t pattern = 0;
  std::optional<Relaxation> top_relaxation;
  double relaxed_top_score = 0.0;    // estimated best score with the relaxation applied
  std::int64_t relaxed_count = 0;    // estimated answers with the relaxation applied
  bool relax = false;
  DecisionReason reason = DecisionReason::kNoRelaxation;
};

struct PlanDiagnostics {
  double kth_score = 0.0;            // estimated k-th best score of the original query
  std::int64_t estimated_count = 0;  // estimated answers of the original query
  bool fallback = false;
  // Some pattern has no matches and no rule: the query cannot answer.
  bool empty_result = false;
  std::vector<PatternDecision> patterns;
};

struct PlannerOptions {
  // Collapse the running join distribution to two buckets after every
  // convolution step, instead of only once at the end.
  bool rebucket_each_step = true;
};

// Estimated answer count and score distribution of a conjunctive query.
struct QueryEstimate {
  std::int64_t count = 0;
  // Absent if there are no answers or every contributing score is zero.
  std::optional<TwoBucketHistogram> histogram;

  // Expected score at `rank`; 0 when the estimate cannot reach that rank.
  double score_at_rank(std::int64_t rank) const;
};

inline constexpr std::size_t kNoRelaxedPattern = std::numeric_limits<std::size_t>::max();

// Folds pattern histograms left to right in query order, with estimated
// counts m <- round(m * m' * phi) from exact selectivities. The pattern at
// `relaxed` (if any) has its histogram scaled by `weight`.
QueryEstimate estimate_query(std::span<const TriplePattern> patterns, const TripleStore& store,
                             const PatternStatsCatalog& catalog, std::size_t relaxed = kNoRelaxedPattern,
                             double weight = 1.0, const PlannerOptions& options = {});

struct PlanResult {
  QueryPlan plan;
  PlanDiagnostics diagnostics;
};

// Marks a pattern as a singleton iff the estimated best score of the query
// with its top-weighted relaxation beats the estimated k-th score of the
// original query. When the original query is estimated to have fewer than
// k answers every pattern with a rule is relaxed.
PlanResult plan(const TripleQuery& query, std::size_t k, const RuleSet& rules, const TripleStore& store,
                const PatternStatsCatalog& catalog, const PlannerOptions& options = {});

// Every pattern a singleton: the exhaustive-relaxation operator tree.
QueryPlan trinit_plan(const TripleQuery& query, std::size_t k);

}  // namespace specqp
