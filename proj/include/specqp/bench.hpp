#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specqp/oracle.hpp"
#include "specqp/pattern.hpp"
#include "specqp/planner.hpp"

namespace specqp {

class TripleStore;
class RuleSet;
class PatternStatsCatalog;

struct BenchOptions {
  std::vector<std::size_t> k_values{10, 15, 20};
  int runs = 5;         // per engine
  int timed_runs = 3;   // the last ones, averaged
  int threads = 1;      // queries run in parallel across this many threads
  std::uint64_t oracle_guard = kOracleGuard;
  PlannerOptions planner;
};

struct QueryMetrics {
  std::string query_id;
  std::size_t k = 0;
  std::string truth_source;  // "oracle" or "trinit"
  double precision = 0.0;
  double recall = 0.0;
  double score_err_mean = 0.0;
  double score_err_std = 0.0;
  bool pred_ok = false;
  double trinit_ms = 0.0;
  double specqp_ms = 0.0;  // execution plus planning
  double plan_ms = 0.0;
  std::uint64_t trinit_objs = 0;
  std::uint64_t specqp_objs = 0;
  // Grouping keys and context, not in the main CSV.
  std::size_t patterns = 0;
  std::size_t truth_relaxed = 0;
  std::size_t plan_relaxed = 0;
  double max_score = 0.0;  // pattern count: the best any answer can score
  std::size_t truth_answers = 0;
  std::size_t specqp_answers = 0;
};

// One row per (query, k), queries in input order, k in option order.
std::vector<QueryMetrics> run_benchmark(const std::vector<TripleQuery>& queries,
                                        const std::vector<std::string>& query_ids, const TripleStore& store,
                                        const RuleSet& rules, const PatternStatsCatalog& catalog,
                                        const BenchOptions& options = {});

inline constexpr const char* kMetricsHeader =
    "query_id,k,engine_truth,precision,recall,score_err_mean,score_err_std,pred_ok,trinit_ms,specqp_ms,plan_ms,"
    "trinit_objs,specqp_objs";

void write_metrics_csv(std::ostream& out, const std::vector<QueryMetrics>& rows);

enum class GroupBy { kPatterns, kRelaxed };

// Per (group, k) means: group,k,queries,precision,score_err_mean,pred_ok,
// trinit_ms,specqp_ms,plan_ms,trinit_objs,specqp_objs.
void write_grouped_csv(std::ostream& out, const std::vector<QueryMetrics>& rows, GroupBy by);

}  // namespace specqp
