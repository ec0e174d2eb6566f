#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "specqp/operators.hpp"
#include "specqp/pattern.hpp"

namespace specqp {

class TripleStore;
class RuleSet;

inline constexpr std::uint64_t kOracleGuard = 10'000'000;

struct OracleOptions {
  std::uint64_t guard = kOracleGuard;  // max relaxed queries to evaluate
  bool parallel = true;
};

struct OracleResult {
  // Score desc, then bindings in lexicographic term order. Each answer's
  // provenance is the combination that gave its best score.
  std::vector<ScoredBinding> answers;
  std::uint64_t combinations = 0;
  std::uint64_t distinct_answers = 0;
};

// Number of relaxed queries: product over patterns of (1 + #relaxations),
// saturating at UINT64_MAX.
std::uint64_t oracle_combinations(const TripleQuery& query, const RuleSet& rules);

// Evaluates every combination of per-pattern choices (original or one
// relaxation) by nested loops over store lookups, scores answers as
// sum(weight * norm_score) and keeps each binding's maximum. Throws
// GuardExceeded if there are more combinations than options.guard.
OracleResult oracle_topk(const TripleQuery& query, const RuleSet& rules, const TripleStore& store, std::size_t k,
                         const OracleOptions& options = {});

// Same, single-threaded.
OracleResult oracle_topk_serial(const TripleQuery& query, const RuleSet& rules, const TripleStore& store,
                                std::size_t k, std::uint64_t guard = kOracleGuard);

// Sum of weight * norm_score over a provenance trail, in pattern order.
double certificate_score(const std::vector<ProvenanceEntry>& provenance);

// Score desc, then binding entries compared by variable and term text.
bool answer_before(const ScoredBinding& a, const ScoredBinding& b, const TripleStore& store);

}  // namespace specqp
