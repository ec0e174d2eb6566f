#include "specqp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "specqp/errors.hpp"

namespace specqp {

const char* to_string(ScoreShape shape) {
  switch (shape) {
    case ScoreShape::kPowerLaw: return "powerlaw";
    case ScoreShape::kUniform: return "uniform";
    case ScoreShape::kConstant: return "constant";
    case ScoreShape::kMixed: return "mixed";
  }
  return "?";
}

ScoreShape parse_score_shape(const std::string& name) {
  if (name == "powerlaw") return ScoreShape::kPowerLaw;
  if (name == "uniform") return ScoreShape::kUniform;
  if (name == "constant") return ScoreShape::kConstant;
  if (name == "mixed") return ScoreShape::kMixed;
  throw ArgumentError("unknown score shape '" + name + "'");
}

namespace {

// Integer-valued heavy tail, like retweet or link counts.
double draw_score(ScoreShape shape, std::mt19937_64& rng) {
  switch (shape) {
    case ScoreShape::kPowerLaw: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return std::floor(std::pow(1.0 - u(rng), -1.0 / 1.3));
    }
    case ScoreShape::kUniform: return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    case ScoreShape::kConstant: return 7.0;
    case ScoreShape::kMixed: break;
  }
  return 1.0;
}

std::size_t zipf_pick(const std::vector<double>& cumulative, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, cumulative.back());
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u(rng));
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> zipf_cumulative(std::size_t n, double exponent) {
  std::vector<double> c(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent);
    c[i] = acc;
  }
  return c;
}

std::string cls(std::size_t c) { return "c" + std::to_string(c); }
std::string ent(std::size_t e) { return "e" + std::to_string(e); }

}  // namespace

SyntheticFixture make_fixture(const SyntheticConfig& cfg, std::size_t query_count) {
  if (cfg.classes < 2 || cfg.triples < 10 || cfg.min_patterns < 1 || cfg.min_patterns > cfg.max_patterns) {
    throw ArgumentError("synthetic config out of range");
  }
  std::mt19937_64 rng(cfg.seed);
  SyntheticFixture fx;

  std::vector<ScoreShape> class_shape(cfg.classes, cfg.shape);
  if (cfg.shape == ScoreShape::kMixed) {
    const ScoreShape pool[] = {ScoreShape::kPowerLaw, ScoreShape::kPowerLaw, ScoreShape::kUniform, ScoreShape::kConstant};
    for (auto& s : class_shape) s = pool[std::uniform_int_distribution<int>(0, 3)(rng)];
  }
  const ScoreShape link_shape = cfg.shape == ScoreShape::kMixed ? ScoreShape::kPowerLaw : cfg.shape;

  const std::size_t links = static_cast<std::size_t>(std::round(cfg.link_fraction * static_cast<double>(cfg.triples)));
  const std::size_t typed = cfg.triples - links;
  const std::size_t entities = std::max<std::size_t>(4, typed / 3);
  const auto popularity = zipf_cumulative(cfg.classes, 0.8);

  std::vector<std::set<std::size_t>> classes_of(entities);
  std::uniform_int_distribution<std::size_t> pick_entity(0, entities - 1);
  for (std::size_t i = 0; i < typed; ++i) {
    const std::size_t e = pick_entity(rng);
    const std::size_t c = zipf_pick(popularity, rng);
    classes_of[e].insert(c);
    fx.records.push_back({ent(e), "type", cls(c), draw_score(class_shape[c], rng)});
  }
  std::vector<std::vector<std::size_t>> out_links(entities);
  for (std::size_t i = 0; i < links; ++i) {
    const std::size_t a = pick_entity(rng);
    const std::size_t b = pick_entity(rng);
    if (a == b) continue;
    out_links[a].push_back(b);
    fx.records.push_back({ent(a), "link", ent(b), draw_score(link_shape, rng)});
  }

  std::uniform_int_distribution<std::size_t> pick_count(0, cfg.max_relaxations);
  std::uniform_real_distribution<double> pick_weight(0.05, 0.95);
  std::uniform_int_distribution<std::size_t> pick_class(0, cfg.classes - 1);
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    const std::size_t n = std::min(pick_count(rng), cfg.classes - 1);
    std::set<std::size_t> targets;
    while (targets.size() < n) {
      const std::size_t t = pick_class(rng);
      if (t != c) targets.insert(t);
    }
    for (std::size_t t : targets) {
      const double w = std::round(pick_weight(rng) * 100.0) / 100.0;
      fx.rules.push_back({parse_pattern("?s type " + cls(c)), parse_pattern("?s type " + cls(t)), w});
    }
  }

  // Entities with enough classes to seed queries of each size.
  std::uniform_int_distribution<std::size_t> pick_size(cfg.min_patterns, cfg.max_patterns);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::size_t attempts = 0;
  while (fx.queries.size() < query_count) {
    if (++attempts > 1000 * (query_count + 1)) throw ArgumentError("synthetic store too sparse for the queries");
    const std::size_t size = pick_size(rng);
    const std::size_t e = pick_entity(rng);
    const bool chain = size >= 2 && !out_links[e].empty() && coin(rng) < cfg.chain_probability;
    TripleQuery q;
    if (chain) {
      const std::size_t other = out_links[e][std::uniform_int_distribution<std::size_t>(0, out_links[e].size() - 1)(rng)];
      if (classes_of[other].empty() || classes_of[e].size() < size - 2) continue;
      std::vector<std::size_t> mine(classes_of[e].begin(), classes_of[e].end());
      std::shuffle(mine.begin(), mine.end(), rng);
      for (std::size_t i = 0; i + 2 < size; ++i) q.patterns.push_back(parse_pattern("?s type " + cls(mine[i])));
      q.patterns.push_back(parse_pattern("?s link ?o"));
      std::vector<std::size_t> theirs(classes_of[other].begin(), classes_of[other].end());
      const std::size_t c = theirs[std::uniform_int_distribution<std::size_t>(0, theirs.size() - 1)(rng)];
      q.patterns.push_back(parse_pattern("?o type " + cls(c)));
    } else {
      if (classes_of[e].size() < size) continue;
      std::vector<std::size_t> mine(classes_of[e].begin(), classes_of[e].end());
      std::shuffle(mine.begin(), mine.end(), rng);
      for (std::size_t i = 0; i < size; ++i) q.patterns.push_back(parse_pattern("?s type " + cls(mine[i])));
    }
    fx.queries.push_back(std::move(q));
  }
  return fx;
}

std::vector<TripleRecord> make_tag_corpus(std::uint64_t seed, std::size_t items, std::size_t vocabulary) {
  if (items == 0 || vocabulary < 2) throw ArgumentError("tag corpus needs items and at least two tags");
  std::mt19937_64 rng(seed);
  const auto popularity = zipf_cumulative(vocabulary, 1.0);
  std::uniform_int_distribution<std::size_t> tag_count(2, std::min<std::size_t>(6, vocabulary));
  std::vector<TripleRecord> out;
  for (std::size_t i = 0; i < items; ++i) {
    const double score = draw_score(ScoreShape::kPowerLaw, rng);
    std::set<std::size_t> tags;
    const std::size_t n = tag_count(rng);
    while (tags.size() < n) tags.insert(zipf_pick(popularity, rng));
    for (std::size_t t : tags) out.push_back({"t" + std::to_string(i), "hasTag", "tag" + std::to_string(t), score});
  }
  return out;
}

}  // namespace specqp
