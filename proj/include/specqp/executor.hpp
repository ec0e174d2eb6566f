#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specqp/operators.hpp"
#include "specqp/planner.hpp"

namespace specqp {

class TripleStore;
class RuleSet;
class PatternStatsCatalog;

enum class Engine { kTrinit, kSpecQP };

const char* to_string(Engine engine);
// "trinit" or "specqp"; throws ArgumentError otherwise.
Engine parse_engine(const std::string& name);

struct ExecutionReport {
  std::string query_id;
  std::string engine;
  std::size_t k = 0;
  std::string plan;
  double wall_ms = 0.0;
  double plan_ms = 0.0;
  std::uint64_t answers_created = 0;
  std::size_t answers_returned = 0;
  std::vector<OperatorReport> operators;  // root first
};

struct ExecutionResult {
  std::vector<ScoredBinding> answers;
  ExecutionReport report;
};

// Lowers the plan to a left-deep operator tree: join group patterns as
// plain scans joined in ascending match count, then each singleton as an
// incremental merge over the pattern and all of its relaxations, joined in
// ascending combined match count. Patterns that share a variable with what
// is already joined go first, so no cross product is formed while a
// connected choice exists. Throws PlanInvalid on a malformed plan.
ExecutionResult execute(const QueryPlan& plan, const TripleStore& store, const RuleSet& rules);

struct QueryRun {
  std::vector<ScoredBinding> answers;
  ExecutionReport report;
  QueryPlan plan;
  std::optional<PlanDiagnostics> diagnostics;  // speculative engine only
};

QueryRun run_query(const TripleQuery& query, std::size_t k, Engine engine, const TripleStore& store,
                   const RuleSet& rules, const PatternStatsCatalog& catalog,
                   const PlannerOptions& options = {});

}  // namespace specqp
