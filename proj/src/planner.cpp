#include "specqp/planner.hpp"

#include <algorithm>
#include <set>
#include <variant>

#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/store.hpp"

namespace specqp {

std::string to_string(const QueryPlan& plan) {
  auto group = [](const std::vector<std::size_t>& idx) {
    std::string out = "{";
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i) out += ',';
      out += 'q' + std::to_string(idx[i] + 1);
    }
    return out + "}";
  };
  std::string out = "{";
  bool first = true;
  if (!plan.join_group.empty()) {
    out += group(plan.join_group);
    first = false;
  }
  for (std::size_t s : plan.singletons) {
    if (!first) out += ',';
    first = false;
    out += group({s});
  }
  return out + "}";
}

void validate_plan(const QueryPlan& plan) {
  std::vector<int> seen(plan.query.size(), 0);
  auto mark = [&](std::size_t i) {
    if (i >= plan.query.size()) throw PlanInvalid("plan refers to unknown pattern q" + std::to_string(i + 1));
    ++seen[i];
  };
  for (std::size_t i : plan.join_group) mark(i);
  for (std::size_t i : plan.singletons) mark(i);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) {
      throw PlanInvalid("pattern q" + std::to_string(i + 1) + " appears " + std::to_string(seen[i]) +
                        " times in the plan");
    }
  }
  if (plan.k < 1) throw PlanInvalid("plan has k = 0");
}

const char* to_string(DecisionReason reason) {
  switch (reason) {
    case DecisionReason::kNoRelaxation: return "no_relaxation";
    case DecisionReason::kEstimate: return "estimate";
    case DecisionReason::kFallback: return "fallback";
  }
  return "?";
}

double QueryEstimate::score_at_rank(std::int64_t rank) const {
  if (count < rank || rank < 1) return 0.0;
  if (!histogram) return 0.0;
  TwoBucketHistogram h = *histogram;
  h.m = count;
  return expected_score_at_rank(h, rank);
}

QueryEstimate estimate_query(std::span<const TriplePattern> patterns, const TripleStore& store,
                             const PatternStatsCatalog& catalog, std::size_t relaxed, double weight,
                             const PlannerOptions& options) {
  QueryEstimate est;
  if (patterns.empty()) return est;
  auto histogram_of = [&](std::size_t j, const PatternStats& stats) -> std::optional<TwoBucketHistogram> {
    if (!stats.histogram) return std::nullopt;
    if (j != relaxed) return stats.histogram;
    if (weight <= 0.0) return std::nullopt;
    return scale_histogram(*stats.histogram, weight);
  };

  // Running distribution: nothing yet (all contributions zero so far), a
  // two-bucket histogram, or a piecewise-linear convolution result.
  std::variant<std::monostate, TwoBucketHistogram, PiecewisePdf> dist;
  PatternStats first = catalog.get(patterns[0]);
  std::int64_t count = first.m;
  if (auto h = histogram_of(0, first)) dist = *h;
  for (std::size_t j = 1; j < patterns.size() && count > 0; ++j) {
    PatternStats stats = catalog.get(patterns[j]);
    SelectivityResult phi = store.join_selectivity(patterns.subspan(0, j), patterns[j]);
    const std::int64_t counts[2] = {count, stats.m};
    const double sel[1] = {phi.value};
    count = estimate_join_count(counts, sel);
    if (count == 0) break;
    auto h = histogram_of(j, stats);
    if (!h) continue;
    if (std::holds_alternative<std::monostate>(dist)) {
      dist = *h;
      continue;
    }
    PiecewisePdf conv = std::holds_alternative<TwoBucketHistogram>(dist)
                            ? convolve(std::get<TwoBucketHistogram>(dist), *h)
                            : convolve(std::get<PiecewisePdf>(dist), *h);
    if (options.rebucket_each_step) {
      dist = rebucket(conv, count);
    } else {
      dist = std::move(conv);
    }
  }
  est.count = count;
  if (count <= 0) {
    est.count = 0;
    return est;
  }
  if (auto* h = std::get_if<TwoBucketHistogram>(&dist)) {
    TwoBucketHistogram out = *h;
    out.m = count;
    est.histogram = out;
  } else if (auto* f = std::get_if<PiecewisePdf>(&dist)) {
    est.histogram = rebucket(*f, count);
  }
  return est;
}

PlanResult plan(const TripleQuery& query, std::size_t k, const RuleSet& rules, const TripleStore& store,
                const PatternStatsCatalog& catalog, const PlannerOptions& options) {
  validate_query(query);
  if (k < 1) throw ArgumentError("k must be at least 1");
  PlanResult result;
  result.plan.query = query;
  result.plan.k = k;
  PlanDiagnostics& diag = result.diagnostics;

  const QueryEstimate base = estimate_query(query.patterns, store, catalog, kNoRelaxedPattern, 1.0, options);
  const auto kk = static_cast<std::int64_t>(k);
  diag.estimated_count = base.count;
  diag.fallback = base.count < kk;
  diag.kth_score = diag.fallback ? 0.0 : base.score_at_rank(kk);

  for (std::size_t i = 0; i < query.size(); ++i) {
    PatternDecision d;
    d.pattern = i;
    d.top_relaxation = rules.top_relaxation(query[i]);
    if (d.top_relaxation) {
      std::vector<TriplePattern> relaxed = query.patterns;
      relaxed[i] = d.top_relaxation->range;
      QueryEstimate est = estimate_query(relaxed, store, catalog, i, d.top_relaxation->weight, options);
      d.relaxed_count = est.count;
      d.relaxed_top_score = est.score_at_rank(1);
      if (diag.fallback) {
        d.relax = true;
        d.reason = DecisionReason::kFallback;
      } else {
        d.relax = d.relaxed_top_score > diag.kth_score;
        d.reason = DecisionReason::kEstimate;
      }
    }
    if (!d.top_relaxation && catalog.get(query[i]).m == 0) diag.empty_result = true;
    (d.relax ? result.plan.singletons : result.plan.join_group).push_back(i);
    diag.patterns.push_back(std::move(d));
  }
  return result;
}

QueryPlan trinit_plan(const TripleQuery& query, std::size_t k) {
  QueryPlan p;
  p.query = query;
  p.k = k;
  for (std::size_t i = 0; i < query.size(); ++i) p.singletons.push_back(i);
  return p;
}

}  // namespace specqp
