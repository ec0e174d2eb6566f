#include "specqp/report_json.hpp"

#include <nlohmann/json.hpp>

namespace specqp {

std::string to_json_line(const ExecutionReport& r) {
  nlohmann::json ops = nlohmann::json::array();
  for (const OperatorReport& o : r.operators) ops.push_back({{"name", o.name}, {"pulls", o.pulls}, {"emitted", o.emitted}});
  nlohmann::json j = {{"query_id", r.query_id},       {"engine", r.engine},
                      {"k", r.k},                     {"plan", r.plan},
                      {"wall_ms", r.wall_ms},         {"plan_ms", r.plan_ms},
                      {"answers_created", r.answers_created}, {"answers_returned", r.answers_returned},
                      {"operators", ops}};
  return j.dump();
}

std::string to_json_line(const PlanDiagnostics& d, const std::string& query_id, const TripleQuery& query) {
  nlohmann::json pats = nlohmann::json::array();
  for (const PatternDecision& p : d.patterns) {
    nlohmann::json e = {{"pattern", "q" + std::to_string(p.pattern + 1)},
                        {"text", to_string(query[p.pattern])},
                        {"relax", p.relax},
                        {"reason", to_string(p.reason)},
                        {"relaxed_top_score", p.relaxed_top_score},
                        {"relaxed_count", p.relaxed_count}};
    if (p.top_relaxation) {
      e["top_relaxation"] = {{"range", to_string(p.top_relaxation->range)}, {"weight", p.top_relaxation->weight}};
    } else {
      e["top_relaxation"] = nullptr;
    }
    pats.push_back(std::move(e));
  }
  nlohmann::json j = {{"query_id", query_id},       {"kth_score", d.kth_score},
                      {"estimated_count", d.estimated_count}, {"fallback", d.fallback},
                      {"empty_result", d.empty_result}, {"patterns", pats}};
  return j.dump();
}

}  // namespace specqp
