#pragma once

#include <string>

#include "specqp/executor.hpp"
#include "specqp/planner.hpp"

namespace specqp {

// Single-line JSON records for JSON-lines logs.
std::string to_json_line(const ExecutionReport& report);
std::string to_json_line(const PlanDiagnostics& diag, const std::string& query_id, const TripleQuery& query);

}  // namespace specqp
