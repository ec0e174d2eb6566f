#include "specqp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "specqp/errors.hpp"

namespace specqp {

ScoreError score_error(std::span<const ScoredBinding> approx, std::span<const ScoredBinding> truth, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  std::vector<double> diffs(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = i < approx.size() ? approx[i].score : 0.0;
    const double t = i < truth.size() ? truth[i].score : 0.0;
    diffs[i] = std::abs(a - t);
  }
  ScoreError e;
  for (double d : diffs) e.mean += d;
  e.mean /= static_cast<double>(k);
  double var = 0.0;
  for (double d : diffs) var += (d - e.mean) * (d - e.mean);
  e.stddev = std::sqrt(var / static_cast<double>(k));
  return e;
}

PrecisionRecall precision_recall(std::span<const ScoredBinding> approx, std::span<const ScoredBinding> truth,
                                 std::size_t k) {
  if (k < 1) throw ArgumentError("k must be at least 1");
  approx = approx.first(std::min(approx.size(), k));
  truth = truth.first(std::min(truth.size(), k));
  std::unordered_set<Binding, BindingHash> truth_set;
  for (const ScoredBinding& t : truth) truth_set.insert(t.binding);
  const bool full = truth.size() == k;
  PrecisionRecall pr;
  for (const ScoredBinding& a : approx) {
    if (truth_set.count(a.binding) ||
        (full && std::abs(a.score - truth.back().score) <= kTieTolerance)) {
      ++pr.correct;
    }
  }
  pr.precision = approx.empty() ? (truth.empty() ? 1.0 : 0.0)
                                : static_cast<double>(pr.correct) / static_cast<double>(approx.size());
  pr.recall = truth.empty() ? 1.0
                            : static_cast<double>(std::min(pr.correct, truth.size())) /
                                  static_cast<double>(truth.size());
  return pr;
}

std::set<std::size_t> relaxed_patterns(std::span<const ScoredBinding> answers) {
  std::set<std::size_t> out;
  for (const ScoredBinding& a : answers) {
    for (const ProvenanceEntry& e : a.provenance) {
      if (e.relaxation >= 0) out.insert(e.pattern);
    }
  }
  return out;
}

bool prediction_accuracy(const PlanDiagnostics& diag, const std::set<std::size_t>& truth_relaxed) {
  std::set<std::size_t> planned;
  for (const PatternDecision& d : diag.patterns) {
    if (d.relax) planned.insert(d.pattern);
  }
  return planned == truth_relaxed;
}

}  // namespace specqp
