#include "specqp/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <tuple>

#include "specqp/errors.hpp"

namespace specqp {

struct TripleStore::SelectivityCache {
  std::shared_mutex mutex;
  std::unordered_map<std::string, SelectivityResult> entries;
};

unsigned ResolvedPattern::constant_mask() const {
  unsigned mask = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (slots[i] < 0) mask |= 1u << i;
  }
  return mask;
}

std::size_t TripleStore::Key3Hash::operator()(const std::array<TermId, 3>& k) const {
  std::uint64_t h = k[0];
  h = h * 0x9e3779b97f4a7c15ull + k[1];
  h = h * 0x9e3779b97f4a7c15ull + k[2];
  return static_cast<std::size_t>(h ^ (h >> 29));
}

TripleStore::TripleStore() : selectivity_cache_(std::make_unique<SelectivityCache>()) {}
TripleStore::TripleStore(TripleStore&&) noexcept = default;
TripleStore& TripleStore::operator=(TripleStore&&) noexcept = default;
TripleStore::~TripleStore() = default;

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::string format_score(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

TripleStore TripleStore::build(std::vector<TripleRecord> records) {
  std::map<std::tuple<std::string, std::string, std::string>, double> dedup;
  for (std::size_t i = 0; i < records.size(); ++i) {
    TripleRecord& r = records[i];
    if (!std::isfinite(r.score)) throw RejectedRecord(i + 1, "score is not finite");
    if (r.score < 0) throw RejectedRecord(i + 1, "negative score " + format_score(r.score));
    auto key = std::make_tuple(std::move(r.subject), std::move(r.predicate), std::move(r.object));
    auto [it, inserted] = dedup.emplace(std::move(key), r.score);
    if (!inserted) it->second = std::max(it->second, r.score);
  }

  TripleStore store;
  // Term ids are assigned in lexicographic order, so id order is string order.
  std::vector<std::string> terms;
  terms.reserve(dedup.size() * 2);
  for (const auto& [key, score] : dedup) {
    terms.push_back(std::get<0>(key));
    terms.push_back(std::get<1>(key));
    terms.push_back(std::get<2>(key));
  }
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  store.terms_ = std::move(terms);
  store.term_ids_.reserve(store.terms_.size());
  store.lex_rank_.resize(store.terms_.size());
  for (std::size_t i = 0; i < store.terms_.size(); ++i) {
    store.term_ids_.emplace(store.terms_[i], static_cast<TermId>(i));
    store.lex_rank_[i] = static_cast<std::uint32_t>(i);
  }

  store.triples_.reserve(dedup.size());
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [key, score] : dedup) {
    const auto& [s, p, o] = key;
    store.triples_.push_back(Triple{store.term_ids_.at(s), store.term_ids_.at(p), store.term_ids_.at(o), score});
    h = fnv1a(h, s);
    h = fnv1a(h, "\t");
    h = fnv1a(h, p);
    h = fnv1a(h, "\t");
    h = fnv1a(h, o);
    h = fnv1a(h, "\t");
    h = fnv1a(h, format_score(score));
    h = fnv1a(h, "\n");
  }
  store.checksum_ = h;

  // triples_ is in (s, p, o) id order; a stable sort by score yields the
  // tie-broken scan order for every posting list.
  std::vector<std::uint32_t> order(store.triples_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return store.triples_[a].raw_score > store.triples_[b].raw_score;
  });
  for (std::uint32_t idx : order) {
    const Triple& t = store.triples_[idx];
    for (unsigned mask = 1; mask < 8; ++mask) {
      std::array<TermId, 3> key{0, 0, 0};
      for (std::size_t pos = 0; pos < 3; ++pos) {
        if (mask & (1u << pos)) key[pos] = t.at(pos);
      }
      store.index_[mask][key].push_back(idx);
    }
  }
  return store;
}

std::optional<TermId> TripleStore::find_term(std::string_view text) const {
  auto it = term_ids_.find(std::string(text));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

ResolvedPattern TripleStore::resolve(const TriplePattern& pattern) const {
  std::vector<std::string> vars;
  return resolve(pattern, vars);
}

ResolvedPattern TripleStore::resolve(const TriplePattern& pattern,
                                     std::vector<std::string>& shared_vars) const {
  if (!pattern.has_constant()) {
    throw InvalidQuery("pattern '" + to_string(pattern) + "' has no constant position");
  }
  ResolvedPattern rp;
  for (std::size_t pos = 0; pos < 3; ++pos) {
    const std::string& term = pattern.at(pos);
    if (is_variable(term)) {
      auto it = std::find(shared_vars.begin(), shared_vars.end(), term);
      if (it == shared_vars.end()) {
        shared_vars.push_back(term);
        it = std::prev(shared_vars.end());
      }
      rp.slots[pos] = static_cast<int>(it - shared_vars.begin());
      rp.var_names[pos] = term;
    } else {
      rp.constants[pos] = find_term(term);
      if (!rp.constants[pos]) rp.unsatisfiable = true;
    }
  }
  return rp;
}

std::span<const std::uint32_t> TripleStore::postings(const std::array<std::optional<TermId>, 3>& key) const {
  unsigned mask = 0;
  std::array<TermId, 3> packed{0, 0, 0};
  for (std::size_t pos = 0; pos < 3; ++pos) {
    if (key[pos]) {
      mask |= 1u << pos;
      packed[pos] = *key[pos];
    }
  }
  if (mask == 0) throw InvalidQuery("posting lookup with no bound position");
  const Postings& idx = index_[mask];
  auto it = idx.find(packed);
  if (it == idx.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> TripleStore::postings(const ResolvedPattern& pattern) const {
  if (pattern.unsatisfiable) return {};
  return postings(pattern.constants);
}

bool TripleStore::satisfies_repeats(const ResolvedPattern& pattern, const Triple& t) const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (pattern.slots[i] < 0) continue;
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (pattern.slots[j] == pattern.slots[i] && t.at(i) != t.at(j)) return false;
    }
  }
  return true;
}

Binding TripleStore::bind(const ResolvedPattern& pattern, const Triple& t) const {
  Binding b;
  for (std::size_t pos = 0; pos < 3; ++pos) {
    if (pattern.slots[pos] >= 0) b.bind(pattern.var_names[pos], t.at(pos));
  }
  return b;
}

PatternScan TripleStore::scan_sorted(const TriplePattern& pattern) const {
  return PatternScan(*this, resolve(pattern));
}

std::vector<ScoredMatch> TripleStore::matches(const TriplePattern& pattern) const {
  std::vector<ScoredMatch> out;
  PatternScan scan = scan_sorted(pattern);
  while (auto m = scan.next()) out.push_back(std::move(*m));
  return out;
}

std::size_t TripleStore::match_count(const TriplePattern& pattern) const {
  ResolvedPattern rp = resolve(pattern);
  auto list = postings(rp);
  bool repeats = false;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (rp.slots[i] >= 0 && rp.slots[i] == rp.slots[j]) repeats = true;
    }
  }
  if (!repeats) return list.size();
  return static_cast<std::size_t>(std::count_if(list.begin(), list.end(), [&](std::uint32_t idx) {
    return satisfies_repeats(rp, triples_[idx]);
  }));
}

double TripleStore::max_raw_score(const TriplePattern& pattern) const {
  ResolvedPattern rp = resolve(pattern);
  for (std::uint32_t idx : postings(rp)) {
    if (satisfies_repeats(rp, triples_[idx])) return triples_[idx].raw_score;
  }
  return 0.0;
}

namespace {

struct AnswerCounter {
  const TripleStore& store;
  std::vector<ResolvedPattern> patterns;
  std::vector<std::optional<TermId>> slots;
  std::uint64_t count = 0;

  void run(std::size_t depth) {
    if (depth == patterns.size()) {
      ++count;
      return;
    }
    const ResolvedPattern& rp = patterns[depth];
    if (rp.unsatisfiable) return;
    std::array<std::optional<TermId>, 3> key = rp.constants;
    for (std::size_t pos = 0; pos < 3; ++pos) {
      if (rp.slots[pos] >= 0) key[pos] = slots[rp.slots[pos]];
    }
    for (std::uint32_t idx : store.postings(key)) {
      const Triple& t = store.triple(idx);
      std::array<int, 3> newly{-1, -1, -1};
      bool ok = true;
      for (std::size_t pos = 0; pos < 3 && ok; ++pos) {
        int slot = rp.slots[pos];
        if (slot < 0) continue;
        if (slots[slot]) {
          ok = *slots[slot] == t.at(pos);
        } else {
          slots[slot] = t.at(pos);
          newly[pos] = slot;
        }
      }
      if (ok) run(depth + 1);
      for (int slot : newly) {
        if (slot >= 0) slots[slot].reset();
      }
    }
  }
};

}  // namespace

std::uint64_t TripleStore::count_answers(std::span<const TriplePattern> patterns) const {
  if (patterns.empty()) return 0;
  // Greedy order: smallest pattern first, then the smallest one connected to
  // what is already bound.
  std::vector<std::size_t> remaining(patterns.size());
  std::iota(remaining.begin(), remaining.end(), 0u);
  std::vector<std::size_t> sizes(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) sizes[i] = match_count(patterns[i]);
  std::vector<std::string> bound;
  std::vector<std::size_t> order;
  while (!remaining.empty()) {
    auto best = remaining.end();
    bool best_connected = false;
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      auto vars = patterns[*it].variables();
      bool connected = std::any_of(vars.begin(), vars.end(), [&](const std::string& v) {
        return std::find(bound.begin(), bound.end(), v) != bound.end();
      });
      if (best == remaining.end() || (connected && !best_connected) ||
          (connected == best_connected && sizes[*it] < sizes[*best])) {
        best = it;
        best_connected = connected;
      }
    }
    for (auto& v : patterns[*best].variables()) {
      if (std::find(bound.begin(), bound.end(), v) == bound.end()) bound.push_back(v);
    }
    order.push_back(*best);
    remaining.erase(best);
  }

  AnswerCounter counter{*this, {}, {}, 0};
  std::vector<std::string> vars;
  for (std::size_t i : order) counter.patterns.push_back(resolve(patterns[i], vars));
  counter.slots.assign(vars.size(), std::nullopt);
  counter.run(0);
  return counter.count;
}

SelectivityResult TripleStore::join_selectivity(std::span<const TriplePattern> left,
                                                const TriplePattern& right) const {
  std::vector<TriplePattern> all(left.begin(), left.end());
  all.push_back(right);
  const std::string key = canonical_key(all);
  {
    std::shared_lock lock(selectivity_cache_->mutex);
    auto it = selectivity_cache_->entries.find(key);
    if (it != selectivity_cache_->entries.end()) return it->second;
  }
  SelectivityResult result;
  result.left_answers = count_answers(left);
  result.right_matches = match_count(right);
  if (result.left_answers == 0 || result.right_matches == 0) {
    result.zero_denominator = true;
  } else {
    result.joined = count_answers(all);
    result.value = static_cast<double>(result.joined) /
                   (static_cast<double>(result.left_answers) * static_cast<double>(result.right_matches));
  }
  std::unique_lock lock(selectivity_cache_->mutex);
  selectivity_cache_->entries.emplace(key, result);
  return result;
}

std::vector<TripleRecord> TripleStore::records() const {
  std::vector<TripleRecord> out;
  out.reserve(triples_.size());
  for (const Triple& t : triples_) {
    out.push_back(TripleRecord{terms_[t.subject], terms_[t.predicate], terms_[t.object], t.raw_score});
  }
  return out;
}

PatternScan::PatternScan(const TripleStore& store, ResolvedPattern pattern)
    : store_(&store), pattern_(std::move(pattern)), postings_(store.postings(pattern_)) {}

std::optional<ScoredMatch> PatternScan::next() {
  while (position_ < postings_.size()) {
    std::uint32_t idx = postings_[position_++];
    const Triple& t = store_->triple(idx);
    if (!store_->satisfies_repeats(pattern_, t)) continue;
    if (max_raw_ < 0) max_raw_ = t.raw_score;
    ++consumed_;
    double norm = max_raw_ > 0 ? t.raw_score / max_raw_ : 0.0;
    return ScoredMatch{store_->bind(pattern_, t), idx, norm};
  }
  return std::nullopt;
}

std::vector<TripleRecord> parse_triples(std::istream& in) {
  std::vector<TripleRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::string_view rest = line;
    for (std::size_t f = 0; f < 4; ++f) {
      auto tab = rest.find('\t');
      if (f < 3) {
        if (tab == std::string_view::npos) throw ParseError(line_no, "expected 4 tab-separated fields");
        fields[f] = rest.substr(0, tab);
        rest.remove_prefix(tab + 1);
      } else {
        if (tab != std::string_view::npos) throw ParseError(line_no, "expected 4 tab-separated fields");
        fields[f] = rest;
      }
      if (fields[f].empty()) throw ParseError(line_no, "empty field");
    }
    double score = 0;
    auto [ptr, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), score);
    if (ec != std::errc{} || ptr != fields[3].data() + fields[3].size()) {
      throw ParseError(line_no, "score '" + std::string(fields[3]) + "' is not a decimal number");
    }
    if (!std::isfinite(score)) throw RejectedRecord(line_no, "score is not finite");
    if (score < 0) throw RejectedRecord(line_no, "negative score " + std::string(fields[3]));
    out.push_back(TripleRecord{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), score});
  }
  return out;
}

TripleStore load_triples(std::istream& in) { return TripleStore::build(parse_triples(in)); }

}  // namespace specqp
