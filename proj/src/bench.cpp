#include "specqp/bench.hpp"

#include <map>
#include <ostream>

#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/executor.hpp"
#include "specqp/metrics.hpp"
#include "specqp/rules.hpp"
#include "specqp/store.hpp"

namespace specqp {

namespace {

struct Timed {
  QueryRun run;
  double wall_ms = 0.0;
  double plan_ms = 0.0;
};

Timed timed_runs(const TripleQuery& q, std::size_t k, Engine engine, const TripleStore& store, const RuleSet& rules,
                 const PatternStatsCatalog& catalog, const BenchOptions& opt) {
  Timed t;
  const int first_timed = opt.runs - opt.timed_runs;
  for (int r = 0; r < opt.runs; ++r) {
    QueryRun run = run_query(q, k, engine, store, rules, catalog, opt.planner);
    if (r >= first_timed) {
      t.wall_ms += run.report.wall_ms + run.report.plan_ms;
      t.plan_ms += run.report.plan_ms;
    }
    if (r + 1 == opt.runs) t.run = std::move(run);
  }
  t.wall_ms /= opt.timed_runs;
  t.plan_ms /= opt.timed_runs;
  return t;
}

QueryMetrics measure(const TripleQuery& q, const std::string& id, std::size_t k, const TripleStore& store,
                     const RuleSet& rules, const PatternStatsCatalog& catalog, const BenchOptions& opt) {
  QueryMetrics m;
  m.query_id = id;
  m.k = k;
  m.patterns = q.size();
  m.max_score = static_cast<double>(q.size());
  Timed trinit = timed_runs(q, k, Engine::kTrinit, store, rules, catalog, opt);
  Timed spec = timed_runs(q, k, Engine::kSpecQP, store, rules, catalog, opt);

  std::vector<ScoredBinding> truth;
  if (oracle_combinations(q, rules) <= opt.oracle_guard) {
    truth = oracle_topk_serial(q, rules, store, k, opt.oracle_guard).answers;
    m.truth_source = "oracle";
  } else {
    truth = trinit.run.answers;
    m.truth_source = "trinit";
  }
  const PrecisionRecall pr = precision_recall(spec.run.answers, truth, k);
  const ScoreError se = score_error(spec.run.answers, truth, k);
  const std::set<std::size_t> truth_relaxed = relaxed_patterns(truth);
  m.precision = pr.precision;
  m.recall = pr.recall;
  m.score_err_mean = se.mean;
  m.score_err_std = se.stddev;
  m.pred_ok = prediction_accuracy(*spec.run.diagnostics, truth_relaxed);
  m.trinit_ms = trinit.wall_ms;
  m.specqp_ms = spec.wall_ms;
  m.plan_ms = spec.plan_ms;
  m.trinit_objs = trinit.run.report.answers_created;
  m.specqp_objs = spec.run.report.answers_created;
  m.truth_relaxed = truth_relaxed.size();
  m.plan_relaxed = spec.run.plan.singletons.size();
  m.truth_answers = truth.size();
  m.specqp_answers = spec.run.answers.size();
  return m;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<QueryMetrics> run_benchmark(const std::vector<TripleQuery>& queries,
                                        const std::vector<std::string>& query_ids, const TripleStore& store,
                                        const RuleSet& rules, const PatternStatsCatalog& catalog,
                                        const BenchOptions& options) {
  if (queries.size() != query_ids.size()) throw ArgumentError("one id per query required");
  if (options.k_values.empty()) throw ArgumentError("no k values");
  for (std::size_t k : options.k_values) {
    if (k < 1) throw ArgumentError("k must be at least 1");
  }
  if (options.runs < 1 || options.timed_runs < 1 || options.timed_runs > options.runs) {
    throw ArgumentError("timed runs must be between 1 and the run count");
  }
  if (options.threads < 1) throw ArgumentError("threads must be at least 1");

  const std::size_t nk = options.k_values.size();
  std::vector<QueryMetrics> rows(queries.size() * nk);
  const auto total = static_cast<std::int64_t>(rows.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(options.threads)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto qi = static_cast<std::size_t>(i) / nk;
    const auto ki = static_cast<std::size_t>(i) % nk;
    try {
      rows[static_cast<std::size_t>(i)] =
          measure(queries[qi], query_ids[qi], options.k_values[ki], store, rules, catalog, options);
    } catch (const std::exception& e) {
#pragma omp critical(specqp_bench_failure)
      if (failure.empty()) failure = query_ids[qi] + ": " + e.what();
    }
  }
  if (!failure.empty()) throw Error(failure);
  return rows;
}

void write_metrics_csv(std::ostream& out, const std::vector<QueryMetrics>& rows) {
  out << kMetricsHeader << '\n';
  for (const QueryMetrics& m : rows) {
    out << m.query_id << ',' << m.k << ',' << m.truth_source << ',' << fmt(m.precision) << ',' << fmt(m.recall) << ','
        << fmt(m.score_err_mean) << ',' << fmt(m.score_err_std) << ',' << (m.pred_ok ? 1 : 0) << ','
        << fmt(m.trinit_ms) << ',' << fmt(m.specqp_ms) << ',' << fmt(m.plan_ms) << ',' << m.trinit_objs << ','
        << m.specqp_objs << '\n';
  }
}

void write_grouped_csv(std::ostream& out, const std::vector<QueryMetrics>& rows, GroupBy by) {
  struct Acc {
    std::size_t n = 0;
    double precision = 0, err = 0, pred = 0, tms = 0, sms = 0, pms = 0, tobj = 0, sobj = 0;
  };
  std::map<std::pair<std::size_t, std::size_t>, Acc> groups;
  for (const QueryMetrics& m : rows) {
    Acc& a = groups[{by == GroupBy::kPatterns ? m.patterns : m.truth_relaxed, m.k}];
    ++a.n;
    a.precision += m.precision;
    a.err += m.score_err_mean;
    a.pred += m.pred_ok ? 1 : 0;
    a.tms += m.trinit_ms;
    a.sms += m.specqp_ms;
    a.pms += m.plan_ms;
    a.tobj += static_cast<double>(m.trinit_objs);
    a.sobj += static_cast<double>(m.specqp_objs);
  }
  out << (by == GroupBy::kPatterns ? "patterns" : "relaxed")
      << ",k,queries,precision,score_err_mean,pred_ok,trinit_ms,specqp_ms,plan_ms,trinit_objs,specqp_objs\n";
  for (const auto& [key, a] : groups) {
    const double n = static_cast<double>(a.n);
    out << key.first << ',' << key.second << ',' << a.n << ',' << fmt(a.precision / n) << ',' << fmt(a.err / n) << ','
        << fmt(a.pred / n) << ',' << fmt(a.tms / n) << ',' << fmt(a.sms / n) << ',' << fmt(a.pms / n) << ','
        << fmt(a.tobj / n) << ',' << fmt(a.sobj / n) << '\n';
  }
}

}  // namespace specqp
