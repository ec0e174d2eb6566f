#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "specqp/operators.hpp"
#include "specqp/rules.hpp"
#include "specqp/synthetic.hpp"
#include "specqp/store.hpp"

namespace specqp::testing {

inline TripleStore store_of(std::vector<TripleRecord> records) { return TripleStore::build(std::move(records)); }

// Small random graph over few terms so patterns collide and join.
inline std::vector<TripleRecord> random_records(std::mt19937_64& rng, std::size_t n, std::size_t entities = 12,
                                                std::size_t predicates = 3, std::size_t classes = 6) {
  std::uniform_int_distribution<std::size_t> e(0, entities - 1), p(0, predicates - 1), c(0, classes - 1);
  std::uniform_int_distribution<int> score(0, 20);
  std::vector<TripleRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      out.push_back({"e" + std::to_string(e(rng)), "type", "c" + std::to_string(c(rng)), double(score(rng))});
    } else {
      out.push_back({"e" + std::to_string(e(rng)), "p" + std::to_string(p(rng)), "e" + std::to_string(e(rng)),
                     double(score(rng))});
    }
  }
  return out;
}

inline std::vector<double> scores_of(const std::vector<ScoredBinding>& v) {
  std::vector<double> s;
  for (const auto& b : v) s.push_back(b.score);
  return s;
}

inline bool same_scores(std::vector<double> a, std::vector<double> b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

// Bindings strictly above the last score (plus tolerance) must agree.
inline bool same_bindings_above_ties(const std::vector<ScoredBinding>& a, const std::vector<ScoredBinding>& b,
                                     double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  const double cut = std::min(a.back().score, b.back().score) + tol;
  auto above = [&](const std::vector<ScoredBinding>& v) {
    std::vector<std::vector<Binding::Entry>> out;
    for (const auto& x : v) {
      if (x.score > cut) out.push_back(x.binding.entries());
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return above(a) == above(b);
}

inline ScoredBinding sb(std::vector<Binding::Entry> entries, double score) {
  return ScoredBinding{Binding(std::move(entries)), score, {}};
}

struct Built {
  TripleStore store;
  RuleSet rules;
  std::vector<TripleQuery> queries;
};

inline Built build(const SyntheticConfig& cfg, std::size_t queries) {
  SyntheticFixture fx = make_fixture(cfg, queries);
  return Built{TripleStore::build(std::move(fx.records)), RuleSet(std::move(fx.rules)), std::move(fx.queries)};
}

}  // namespace specqp::testing
