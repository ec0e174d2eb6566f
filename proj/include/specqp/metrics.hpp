#pragma once

#include <cstddef>
#include <set>
#include <span>

#include "specqp/operators.hpp"
#include "specqp/planner.hpp"

namespace specqp {

inline constexpr double kTieTolerance = 1e-9;

struct ScoreError {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Rank-aligned absolute score differences over k positions. A list shorter
// than k is padded with zero scores. Throws ArgumentError if k < 1.
ScoreError score_error(std::span<const ScoredBinding> approx, std::span<const ScoredBinding> truth, std::size_t k);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
  std::size_t correct = 0;
};

// An approximate answer is correct if its binding is among the truth, or the
// truth holds k answers and the answer scores within kTieTolerance of the
// truth's last score (a tie at the cut). precision = correct / |approx|,
// recall = min(correct, |truth|) / |truth|; an empty list counts as 1.
PrecisionRecall precision_recall(std::span<const ScoredBinding> approx, std::span<const ScoredBinding> truth,
                                 std::size_t k);

// Patterns whose contribution in some answer came through a relaxation.
std::set<std::size_t> relaxed_patterns(std::span<const ScoredBinding> answers);

// True iff the planner relaxed exactly `truth_relaxed`.
bool prediction_accuracy(const PlanDiagnostics& diag, const std::set<std::size_t>& truth_relaxed);

}  // namespace specqp
