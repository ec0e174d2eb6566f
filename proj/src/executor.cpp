#include "specqp/executor.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/rules.hpp"
#include "specqp/store.hpp"

namespace specqp {

const char* to_string(Engine engine) { return engine == Engine::kTrinit ? "trinit" : "specqp"; }

Engine parse_engine(const std::string& name) {
  if (name == "trinit") return Engine::kTrinit;
  if (name == "specqp") return Engine::kSpecQP;
  throw ArgumentError("unknown engine '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Leaf {
  std::size_t pattern;
  std::size_t count;
  std::set<std::string> vars;
};

// Greedy ordering: smallest first; afterwards the smallest leaf sharing a
// variable with `bound`, falling back to the smallest of all.
std::vector<Leaf> order_leaves(std::vector<Leaf> leaves, std::set<std::string> bound) {
  std::vector<Leaf> out;
  while (!leaves.empty()) {
    std::size_t best = leaves.size();
    bool best_connected = false;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      bool connected = bound.empty() || std::any_of(leaves[i].vars.begin(), leaves[i].vars.end(),
                                                    [&](const std::string& v) { return bound.count(v) > 0; });
      auto key = [](const Leaf& l) { return std::make_pair(l.count, l.pattern); };
      if (best == leaves.size() || (connected && !best_connected) ||
          (connected == best_connected && key(leaves[i]) < key(leaves[best]))) {
        best = i;
        best_connected = connected;
      }
    }
    bound.insert(leaves[best].vars.begin(), leaves[best].vars.end());
    out.push_back(std::move(leaves[best]));
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

std::set<std::string> vars_of(const TriplePattern& p) {
  auto v = p.variables();
  return {v.begin(), v.end()};
}

}  // namespace

ExecutionResult execute(const QueryPlan& plan, const TripleStore& store, const RuleSet& rules) {
  validate_plan(plan);
  const auto start = Clock::now();
  OperatorStats stats;
  const TripleQuery& q = plan.query;

  std::vector<Leaf> group;
  for (std::size_t i : plan.join_group) group.push_back({i, store.match_count(q[i]), vars_of(q[i])});
  group = order_leaves(std::move(group), {});
  std::set<std::string> bound;
  for (const Leaf& l : group) bound.insert(l.vars.begin(), l.vars.end());

  std::vector<Leaf> singles;
  for (std::size_t i : plan.singletons) {
    std::size_t count = store.match_count(q[i]);
    for (const Relaxation& r : rules.relaxations_for(q[i])) count += store.match_count(r.range);
    singles.push_back({i, count, vars_of(q[i])});
  }
  singles = order_leaves(std::move(singles), bound);

  std::vector<std::pair<std::unique_ptr<BindingStream>, std::set<std::string>>> streams;
  for (const Leaf& l : group) {
    auto scan = std::make_unique<PatternScan>(store.scan_sorted(q[l.pattern]));
    streams.emplace_back(std::make_unique<ScanSource>(std::move(scan), l.pattern, stats), l.vars);
  }
  for (const Leaf& l : singles) {
    std::vector<MergeInput> inputs;
    inputs.push_back({std::make_unique<PatternScan>(store.scan_sorted(q[l.pattern])), 1.0, -1});
    auto relaxations = rules.relaxations_for(q[l.pattern]);
    for (std::size_t r = 0; r < relaxations.size(); ++r) {
      inputs.push_back({std::make_unique<PatternScan>(store.scan_sorted(relaxations[r].range)),
                        relaxations[r].weight, static_cast<int>(r)});
    }
    streams.emplace_back(std::make_unique<IncrementalMerge>(std::move(inputs), l.pattern, stats), l.vars);
  }

  // Only the root may stop early: an interior join cut at k results could
  // drop partial answers that survive the later joins.
  std::unique_ptr<BindingStream> root = std::move(streams[0].first);
  std::set<std::string> root_vars = streams[0].second;
  for (std::size_t i = 1; i < streams.size(); ++i) {
    std::vector<std::string> shared;
    for (const std::string& v : streams[i].second) {
      if (root_vars.count(v)) shared.push_back(v);
    }
    const std::size_t hint = i + 1 == streams.size() ? plan.k : 0;
    root = std::make_unique<RankJoin>(std::move(root), std::move(streams[i].first), std::move(shared), hint, stats);
    root_vars.insert(streams[i].second.begin(), streams[i].second.end());
  }

  ExecutionResult result;
  result.answers = top_k_sink(*root, plan.k);
  result.report.wall_ms = ms_since(start);
  result.report.k = plan.k;
  result.report.plan = to_string(plan);
  result.report.answers_created = stats.answers_created;
  result.report.answers_returned = result.answers.size();
  root->report(result.report.operators);
  return result;
}

QueryRun run_query(const TripleQuery& query, std::size_t k, Engine engine, const TripleStore& store,
                   const RuleSet& rules, const PatternStatsCatalog& catalog, const PlannerOptions& options) {
  validate_query(query);
  if (k < 1) throw ArgumentError("k must be at least 1");
  QueryRun run;
  double plan_ms = 0.0;
  if (engine == Engine::kTrinit) {
    run.plan = trinit_plan(query, k);
  } else {
    const auto start = Clock::now();
    PlanResult planned = plan(query, k, rules, store, catalog, options);
    plan_ms = ms_since(start);
    run.plan = std::move(planned.plan);
    run.diagnostics = std::move(planned.diagnostics);
  }
  ExecutionResult exec = execute(run.plan, store, rules);
  run.answers = std::move(exec.answers);
  run.report = std::move(exec.report);
  run.report.engine = to_string(engine);
  run.report.plan_ms = plan_ms;
  return run;
}

}  // namespace specqp
