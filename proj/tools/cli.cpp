#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "specqp/bench.hpp"
#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/executor.hpp"
#include "specqp/oracle.hpp"
#include "specqp/report_json.hpp"
#include "specqp/rules.hpp"
#include "specqp/store.hpp"
#include "specqp/store_dir.hpp"
#include "specqp/synthetic.hpp"

namespace specqp {

namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

RuleSet read_rules(const std::string& path) {
  if (path.empty()) return RuleSet();
  auto in = open_input(path);
  return parse_rules(in);
}

std::vector<TripleQuery> read_queries(const std::string& path) {
  auto in = open_input(path);
  auto queries = parse_queries(in);
  if (queries.empty()) throw InvalidQuery(path + " holds no query");
  for (const TripleQuery& q : queries) validate_query(q);
  return queries;
}

std::string format_binding(const Binding& b, const TripleStore& store) {
  std::string out;
  for (const auto& [var, id] : b.entries()) {
    if (!out.empty()) out += ' ';
    out += var + '=' + store.term(id);
  }
  return out;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v == 0) throw ArgumentError("bad k value '" + item + "'");
    ks.push_back(v);
  }
  if (ks.empty()) throw ArgumentError("empty k list");
  return ks;
}

void ensure_stats(const fs::path& dir, PatternStatsCatalog& catalog) { load_catalog(dir, catalog); }

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Top-k triple pattern queries with weighted relaxation"};
  app.require_subcommand(1);

  std::string triples, store_dir, out_path, rules_path, queries_path, engine = "specqp", report_path, k_list = "10,15,20";
  double min_weight = 0.1;
  std::string tag_predicate = "hasTag";
  std::size_t k = 10;
  int threads = 1, runs = 5;
  bool diagnostics = false, serial = false;
  std::uint64_t seed = 1;
  std::size_t fixture_triples = 2000, fixture_queries = 60, fixture_classes = 30, max_patterns = 4;
  std::string shape = "mixed";
  bool tags = false;

  auto* ingest = app.add_subcommand("ingest", "Build a store directory from a TSV of scored triples");
  ingest->add_option("--triples", triples, "subject<TAB>predicate<TAB>object<TAB>score file")->required();
  ingest->add_option("--out", out_path, "store directory")->required();

  auto* mine = app.add_subcommand("mine-rules", "Mine tag co-occurrence relaxation rules");
  mine->add_option("--store", store_dir)->required();
  mine->add_option("--min-weight", min_weight)->check(CLI::Range(0.0, 1.0));
  mine->add_option("--tag-predicate", tag_predicate);
  mine->add_option("--out", out_path)->required();

  auto* stats = app.add_subcommand("stats", "Prebuild pattern histograms for a query file");
  stats->add_option("--store", store_dir)->required();
  stats->add_option("--queries", queries_path)->required();
  stats->add_option("--rules", rules_path);
  stats->add_flag("--serial", serial, "build on one thread");

  auto* query = app.add_subcommand("query", "Run queries and print ranked answers");
  query->add_option("--store", store_dir)->required();
  query->add_option("--rules", rules_path);
  query->add_option("--engine", engine)->check(CLI::IsMember({"trinit", "specqp", "oracle"}));
  query->add_option("--k", k)->check(CLI::PositiveNumber);
  query->add_option("--query", queries_path)->required();
  query->add_option("--report", report_path, "append JSON-lines execution reports here");
  query->add_flag("--diagnostics", diagnostics, "print planner diagnostics as JSON lines");

  auto* bench = app.add_subcommand("bench", "Compare both engines against the oracle");
  bench->add_option("--store", store_dir)->required();
  bench->add_option("--rules", rules_path);
  bench->add_option("--queries", queries_path)->required();
  bench->add_option("--k", k_list);
  bench->add_option("--out", out_path)->required();
  bench->add_option("--threads", threads)->check(CLI::PositiveNumber);
  bench->add_option("--runs", runs)->check(CLI::Range(3, 1000));

  auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic triples/rules/queries fixture");
  gen->add_option("--out", out_path)->required();
  gen->add_option("--seed", seed);
  gen->add_option("--triples", fixture_triples)->check(CLI::Range(10, 10'000'000));
  gen->add_option("--queries", fixture_queries);
  gen->add_option("--classes", fixture_classes)->check(CLI::Range(2, 100'000));
  gen->add_option("--max-patterns", max_patterns)->check(CLI::Range(1, 8));
  gen->add_option("--shape", shape)->check(CLI::IsMember({"powerlaw", "uniform", "constant", "mixed"}));
  gen->add_flag("--tags", tags, "tag corpus for mine-rules instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest) {
      auto in = open_input(triples);
      TripleStore store = load_triples(in);
      write_store_dir(out_path, store);
      out << "ingested " << store.size() << " triples into " << out_path << "\n";
    } else if (*mine) {
      TripleStore store = open_store_dir(store_dir);
      RuleSet rules = mine_cooccurrence_rules(store, min_weight, tag_predicate);
      auto o = open_output(out_path);
      write_rules(o, rules);
      out << "mined " << rules.size() << " rules\n";
    } else if (*stats) {
      TripleStore store = open_store_dir(store_dir);
      RuleSet rules = read_rules(rules_path);
      PatternStatsCatalog catalog(store);
      ensure_stats(store_dir, catalog);
      std::vector<TriplePattern> patterns;
      for (const TripleQuery& q : read_queries(queries_path)) {
        for (const TriplePattern& p : q.patterns) {
          patterns.push_back(p);
          for (const Relaxation& r : rules.relaxations_for(p)) patterns.push_back(r.range);
        }
      }
      const std::size_t built = catalog.prebuild(patterns, !serial);
      save_catalog(store_dir, catalog);
      out << "built " << built << " histograms, catalog holds " << catalog.size() << "\n";
    } else if (*query) {
      TripleStore store = open_store_dir(store_dir);
      RuleSet rules = read_rules(rules_path);
      PatternStatsCatalog catalog(store);
      ensure_stats(store_dir, catalog);
      auto queries = read_queries(queries_path);
      std::ofstream report;
      if (!report_path.empty()) {
        report.open(report_path, std::ios::binary | std::ios::app);
        if (!report) throw IoError("cannot write " + report_path);
      }
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const std::string id = "Q" + std::to_string(qi + 1);
        if (queries.size() > 1) out << "# " << id << "\n";
        std::vector<ScoredBinding> answers;
        if (engine == "oracle") {
          answers = oracle_topk(queries[qi], rules, store, k).answers;
        } else {
          QueryRun run = run_query(queries[qi], k, parse_engine(engine), store, rules, catalog);
          run.report.query_id = id;
          if (report) report << to_json_line(run.report) << "\n";
          if (diagnostics && run.diagnostics) err << to_json_line(*run.diagnostics, id, queries[qi]) << "\n";
          answers = std::move(run.answers);
        }
        for (std::size_t r = 0; r < answers.size(); ++r) {
          out << r + 1 << '\t' << format_score(answers[r].score) << '\t' << format_binding(answers[r].binding, store)
              << "\n";
        }
      }
    } else if (*bench) {
      TripleStore store = open_store_dir(store_dir);
      RuleSet rules = read_rules(rules_path);
      PatternStatsCatalog catalog(store);
      ensure_stats(store_dir, catalog);
      auto queries = read_queries(queries_path);
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < queries.size(); ++i) ids.push_back("Q" + std::to_string(i + 1));
      BenchOptions opt;
      opt.k_values = parse_k_list(k_list);
      opt.threads = threads;
      opt.runs = runs;
      auto rows = run_benchmark(queries, ids, store, rules, catalog, opt);
      {
        auto o = open_output(out_path);
        write_metrics_csv(o, rows);
      }
      fs::path base(out_path);
      fs::path stem = base.parent_path() / base.stem();
      {
        auto o = open_output(stem.string() + ".by_patterns.csv");
        write_grouped_csv(o, rows, GroupBy::kPatterns);
      }
      {
        auto o = open_output(stem.string() + ".by_relaxed.csv");
        write_grouped_csv(o, rows, GroupBy::kRelaxed);
      }
      out << "wrote " << rows.size() << " rows to " << out_path << "\n";
    } else if (*gen) {
      std::error_code ec;
      fs::create_directories(out_path, ec);
      if (ec) throw IoError("cannot create " + out_path + ": " + ec.message());
      const fs::path dir(out_path);
      std::vector<TripleRecord> records;
      if (tags) {
        records = make_tag_corpus(seed, fixture_triples / 4 + 1, fixture_classes);
      } else {
        SyntheticConfig cfg;
        cfg.seed = seed;
        cfg.triples = fixture_triples;
        cfg.classes = fixture_classes;
        cfg.max_patterns = max_patterns;
        cfg.shape = parse_score_shape(shape);
        SyntheticFixture fx = make_fixture(cfg, fixture_queries);
        records = std::move(fx.records);
        auto r = open_output((dir / "rules.tsv").string());
        write_rules(r, RuleSet(fx.rules));
        auto q = open_output((dir / "queries.txt").string());
        for (std::size_t i = 0; i < fx.queries.size(); ++i) {
          if (i) q << "\n";
          for (const TriplePattern& p : fx.queries[i].patterns) q << to_string(p) << "\n";
        }
      }
      auto t = open_output((dir / "triples.tsv").string());
      for (const TripleRecord& rec : records) {
        t << rec.subject << '\t' << rec.predicate << '\t' << rec.object << '\t' << format_score(rec.score) << '\n';
      }
      out << "wrote " << records.size() << " triples to " << out_path << "\n";
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace specqp
