#include "specqp/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

#include <omp.h>

#include "specqp/errors.hpp"
#include "specqp/rules.hpp"
#include "specqp/store.hpp"

namespace specqp {

namespace {

struct Choice {
  ResolvedPattern resolved;
  double weight = 1.0;
  double max_raw = 0.0;
  int relaxation = -1;
};

struct Best {
  double score = -1.0;
  std::vector<ProvenanceEntry> provenance;
};

using AnswerMap = std::unordered_map<Binding, Best, BindingHash>;

bool combination_less(const std::vector<ProvenanceEntry>& a, const std::vector<ProvenanceEntry>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i].relaxation != b[i].relaxation) return a[i].relaxation < b[i].relaxation;
    if (a[i].triple != b[i].triple) return a[i].triple < b[i].triple;
  }
  return a.size() < b.size();
}

void offer(AnswerMap& map, const Binding& b, double score, const std::vector<ProvenanceEntry>& prov) {
  auto [it, inserted] = map.try_emplace(b);
  Best& best = it->second;
  if (inserted || score > best.score || (score == best.score && combination_less(prov, best.provenance))) {
    best.score = score;
    best.provenance = prov;
  }
}

class Enumerator {
 public:
  Enumerator(const TripleQuery& query, const RuleSet& rules, const TripleStore& store)
      : store_(store), n_(query.size()) {
    // One evaluation order for every combination: relaxed ranges keep the
    // original variables, so connectivity is the same.
    std::vector<bool> used(n_, false);
    std::set<std::string> bound;
    bool pick_connected = false;
    for (std::size_t step = 0; step < n_; ++step) {
      std::size_t pick = n_;
      for (std::size_t i = 0; i < n_; ++i) {
        if (used[i]) continue;
        auto vars = query[i].variables();
        bool connected = std::any_of(vars.begin(), vars.end(), [&](const std::string& v) { return bound.count(v); });
        if (pick == n_ || (connected && !pick_connected)) {
          pick = i;
          pick_connected = connected;
        }
      }
      used[pick] = true;
      order_.push_back(pick);
      for (const std::string& v : query[pick].variables()) bound.insert(v);
      pick_connected = false;
    }

    // Slots are fixed up front so a range that lists the variables in
    // another order still binds the same slots.
    var_names_ = query.variables();
    choices_.resize(n_);
    for (std::size_t i : order_) {
      choices_[i].push_back(make_choice(query[i], 1.0, -1));
      auto relaxations = rules.relaxations_for(query[i]);
      for (std::size_t r = 0; r < relaxations.size(); ++r) {
        choices_[i].push_back(make_choice(relaxations[r].range, relaxations[r].weight, static_cast<int>(r)));
      }
    }
  }

  std::uint64_t combinations() const {
    std::uint64_t total = 1;
    for (const auto& c : choices_) {
      if (total > std::numeric_limits<std::uint64_t>::max() / c.size()) return std::numeric_limits<std::uint64_t>::max();
      total *= c.size();
    }
    return total;
  }

  void evaluate(std::uint64_t combo, AnswerMap& out) const {
    std::vector<const Choice*> picked(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      picked[i] = &choices_[i][combo % choices_[i].size()];
      combo /= choices_[i].size();
    }
    std::vector<std::optional<TermId>> slots(var_names_.size());
    std::vector<std::uint32_t> triples(n_);
    recurse(0, picked, slots, triples, out);
  }

 private:
  Choice make_choice(const TriplePattern& p, double weight, int relaxation) const {
    Choice c;
    std::vector<std::string> vars = var_names_;
    c.resolved = store_.resolve(p, vars);
    c.weight = weight;
    c.max_raw = store_.max_raw_score(p);
    c.relaxation = relaxation;
    return c;
  }

  void recurse(std::size_t depth, const std::vector<const Choice*>& picked, std::vector<std::optional<TermId>>& slots,
               std::vector<std::uint32_t>& triples, AnswerMap& out) const {
    if (depth == n_) {
      emit(picked, slots, triples, out);
      return;
    }
    const std::size_t pi = order_[depth];
    const ResolvedPattern& rp = picked[pi]->resolved;
    if (rp.unsatisfiable) return;
    std::array<std::optional<TermId>, 3> key = rp.constants;
    for (std::size_t pos = 0; pos < 3; ++pos) {
      if (rp.slots[pos] >= 0 && slots[rp.slots[pos]]) key[pos] = slots[rp.slots[pos]];
    }
    for (std::uint32_t idx : store_.postings(key)) {
      const Triple& t = store_.triple(idx);
      if (!store_.satisfies_repeats(rp, t)) continue;
      std::vector<int> newly;
      for (std::size_t pos = 0; pos < 3; ++pos) {
        int s = rp.slots[pos];
        if (s >= 0 && !slots[s]) {
          slots[s] = t.at(pos);
          newly.push_back(s);
        }
      }
      triples[pi] = idx;
      recurse(depth + 1, picked, slots, triples, out);
      for (int s : newly) slots[s].reset();
    }
  }

  void emit(const std::vector<const Choice*>& picked, const std::vector<std::optional<TermId>>& slots,
            const std::vector<std::uint32_t>& triples, AnswerMap& out) const {
    std::vector<ProvenanceEntry> prov(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const Triple& t = store_.triple(triples[i]);
      double norm = picked[i]->max_raw > 0 ? t.raw_score / picked[i]->max_raw : 0.0;
      prov[i] = ProvenanceEntry{i, picked[i]->relaxation, picked[i]->weight, norm, triples[i]};
    }
    std::vector<Binding::Entry> entries;
    for (std::size_t s = 0; s < var_names_.size(); ++s) entries.emplace_back(var_names_[s], *slots[s]);
    offer(out, Binding(std::move(entries)), certificate_score(prov), prov);
  }

  const TripleStore& store_;
  std::size_t n_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<Choice>> choices_;
  std::vector<std::string> var_names_;
};

OracleResult finish(AnswerMap& map, std::uint64_t combinations, std::size_t k, const TripleStore& store) {
  OracleResult result;
  result.combinations = combinations;
  result.distinct_answers = map.size();
  std::vector<ScoredBinding> all;
  all.reserve(map.size());
  for (auto& [b, best] : map) all.push_back(ScoredBinding{b, best.score, std::move(best.provenance)});
  auto cmp = [&](const ScoredBinding& a, const ScoredBinding& b) { return answer_before(a, b, store); };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), cmp);
  all.resize(keep);
  result.answers = std::move(all);
  return result;
}

OracleResult run_oracle(const TripleQuery& query, const RuleSet& rules, const TripleStore& store, std::size_t k,
                        std::uint64_t guard, bool parallel) {
  validate_query(query);
  if (k < 1) throw ArgumentError("k must be at least 1");
  Enumerator en(query, rules, store);
  const std::uint64_t combos = en.combinations();
  if (combos > guard) {
    throw GuardExceeded("oracle would evaluate " + std::to_string(combos) + " relaxed queries (guard " +
                        std::to_string(guard) + ")");
  }
  AnswerMap merged;
  const auto total = static_cast<std::int64_t>(combos);
#pragma omp parallel if (parallel)
  {
    AnswerMap local;
#pragma omp for schedule(dynamic)
    for (std::int64_t c = 0; c < total; ++c) en.evaluate(static_cast<std::uint64_t>(c), local);
#pragma omp critical(specqp_oracle_merge)
    for (auto& [b, best] : local) offer(merged, b, best.score, best.provenance);
  }
  return finish(merged, combos, k, store);
}

}  // namespace

std::uint64_t oracle_combinations(const TripleQuery& query, const RuleSet& rules) {
  std::uint64_t total = 1;
  for (const TriplePattern& p : query.patterns) {
    const std::uint64_t c = 1 + rules.relaxations_for(p).size();
    if (total > std::numeric_limits<std::uint64_t>::max() / c) return std::numeric_limits<std::uint64_t>::max();
    total *= c;
  }
  return total;
}

OracleResult oracle_topk(const TripleQuery& query, const RuleSet& rules, const TripleStore& store, std::size_t k,
                         const OracleOptions& options) {
  return run_oracle(query, rules, store, k, options.guard, options.parallel);
}

OracleResult oracle_topk_serial(const TripleQuery& query, const RuleSet& rules, const TripleStore& store,
                                std::size_t k, std::uint64_t guard) {
  return run_oracle(query, rules, store, k, guard, false);
}

double certificate_score(const std::vector<ProvenanceEntry>& provenance) {
  double s = 0.0;
  for (const ProvenanceEntry& e : provenance) s += e.weight * e.norm_score;
  return s;
}

bool answer_before(const ScoredBinding& a, const ScoredBinding& b, const TripleStore& store) {
  if (a.score != b.score) return a.score > b.score;
  const auto& x = a.binding.entries();
  const auto& y = b.binding.entries();
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i].first != y[i].first) return x[i].first < y[i].first;
    if (x[i].second != y[i].second) return store.term(x[i].second) < store.term(y[i].second);
  }
  return x.size() < y.size();
}

}  // namespace specqp
